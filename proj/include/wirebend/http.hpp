#pragma once

#include "wirebend/service.hpp"

namespace httplib {
class Server;
}

namespace wirebend {

// Routes every GET/POST on `server` to `service`. The session id comes from
// the X-Session-Id header ("default" when absent).
void bind_routes(httplib::Server& server, Service& service);

}  // namespace wirebend

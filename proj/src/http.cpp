#include "wirebend/http.hpp"

#include <httplib.h>

namespace wirebend {

void bind_routes(httplib::Server& server, Service& service) {
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        if (req.has_header("X-Session-Id")) r.session = req.get_header_value("X-Session-Id");
        const auto out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
}

}  // namespace wirebend

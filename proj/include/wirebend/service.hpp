#pragma once

#include "wirebend/machine_model.hpp"
#include "wirebend/part.hpp"

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace wirebend {

struct Request {
    std::string method;                        // "GET" | "POST"
    std::string path;                          // "/parts/3/simplify"
    std::map<std::string, std::string> query;  // decoded query parameters
    std::string body;
    std::string session = "default";
};

struct Response {
    int status = 200;
    std::string body;
};

// Transport-independent request handler; tools/wirebend_service.cpp binds
// it to HTTP. One scene per session id. Mutations of a session are
// serialized, reads run concurrently. Every mutator answers with
// {"scene": ..., "warnings": [...]}.
class Service {
public:
    static constexpr std::size_t kUndoDepth = 50;

    explicit Service(MachineProfile profile);

    Response handle(const Request& request);

    const MachineProfile& profile() const { return profile_; }

    // Test hooks.
    Scene scene(const std::string& session = "default");
    std::size_t undo_depth(const std::string& session = "default");

private:
    struct Session {
        std::shared_mutex mutex;
        Scene scene;
        std::deque<Scene> undo;
    };

    std::shared_ptr<Session> session(const std::string& id);
    Response dispatch(const Request& request);

    MachineProfile profile_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace wirebend

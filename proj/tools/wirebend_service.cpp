// HTTP front end for wirebend::Service.
//
//   wirebend-service --profile m.json [--host 127.0.0.1]    (port from $PORT, default 8080)
#include "wirebend/errors.hpp"
#include "wirebend/http.hpp"
#include "wirebend/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    std::string profile_path;
    std::string host = "127.0.0.1";
    CLI::App app{"wirebend design service", "wirebend-service"};
    app.add_option("--profile", profile_path, "machine profile JSON")->required();
    app.add_option("--host", host, "bind address");
    CLI11_PARSE(app, argc, argv);

    int port = 8080;
    if (const char* env = std::getenv("PORT")) port = std::atoi(env);

    std::unique_ptr<wirebend::Service> service;
    try {
        service = std::make_unique<wirebend::Service>(wirebend::load_profile(profile_path));
    } catch (const wirebend::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    httplib::Server server;
    wirebend::bind_routes(server, *service);

    std::cerr << "listening on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 3;
    }
}

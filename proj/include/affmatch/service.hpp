#pragma once

#include "affmatch/json_io.hpp"
#include "affmatch/matcher.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace affmatch {

// HTTP surface over frozen snapshots. Registries are installed before
// set_ready(); handlers answer 503 until then and never mutate state after,
// so concurrent requests need no further coordination.
//
//   POST /match  {"query": ..., "type": "country"|"grid"|"rnsr",
//                 "conditions": [{"criterion": ..., "value": ...}]?}
//   GET  /health
class MatchService {
public:
    MatchService();
    ~MatchService();

    MatchService(const MatchService&) = delete;
    MatchService& operator=(const MatchService&) = delete;

    void add_registry(RegistrySnapshot snapshot, MatchConfig config);
    void set_ready();
    bool ready() const { return ready_.load(std::memory_order_acquire); }

    // Request logic without the socket; returns the response body and sets
    // the status code. Used by the HTTP handler and directly by tests.
    nlohmann::json handle_match(const nlohmann::json& body, int& status) const;
    nlohmann::json handle_health(int& status) const;

    // Binds to an OS-assigned port and serves from a background thread.
    int start(const std::string& host);
    // Binds and serves on the calling thread.
    bool listen(const std::string& host, int port);
    void stop();

private:
    void install_routes();

    struct Target {
        RegistrySnapshot snapshot;
        MatchConfig config;
    };
    std::map<RegistryKind, Target> registries_;
    std::atomic<bool> ready_{false};
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace affmatch

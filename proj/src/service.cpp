#include "affmatch/service.hpp"

#include "affmatch/errors.hpp"

#include <httplib.h>

using nlohmann::json;

namespace affmatch {

MatchService::MatchService() : server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

MatchService::~MatchService() {
    stop();
}

void MatchService::add_registry(RegistrySnapshot snapshot, MatchConfig config) {
    if (ready()) {
        throw std::logic_error("service already marked ready");
    }
    config.validate(CriterionCatalog::default_catalog());
    const RegistryKind kind = snapshot.registry;
    registries_.insert_or_assign(kind, Target{std::move(snapshot), std::move(config)});
}

void MatchService::set_ready() {
    ready_.store(true, std::memory_order_release);
}

json MatchService::handle_health(int& status) const {
    if (!ready()) {
        status = 503;
        return json{{"status", "loading"}};
    }
    status = 200;
    return json{{"status", "ok"}};
}

json MatchService::handle_match(const json& body, int& status) const {
    if (!ready()) {
        status = 503;
        return json{{"error", "indexes are still loading"}};
    }
    if (!body.is_object() || !body.contains("query") || !body.at("query").is_string()) {
        status = 400;
        return json{{"error", "missing query"}};
    }
    if (!body.contains("type") || !body.at("type").is_string()) {
        status = 400;
        return json{{"error", "missing type"}};
    }

    RegistryKind kind;
    try {
        kind = registry_kind_from_string(body.at("type").get<std::string>());
    } catch (const ConfigError&) {
        status = 400;
        return json{{"error", "unknown type: " + body.at("type").get<std::string>()}};
    }
    const auto it = registries_.find(kind);
    if (it == registries_.end()) {
        status = 400;
        return json{{"error", "no snapshot loaded for type: " + to_string(kind)}};
    }

    std::vector<Condition> conditions;
    if (body.contains("conditions")) {
        try {
            conditions = conditions_from_json(body.at("conditions"));
        } catch (const ConfigError& e) {
            status = 400;
            return json{{"error", e.what()}};
        }
    }

    try {
        const auto results = match_affiliation(body.at("query").get<std::string>(), conditions,
                                               it->second.config, it->second.snapshot);
        status = 200;
        return json{{"results", results_to_json(results)}};
    } catch (const ConfigError& e) {
        status = 400;
        return json{{"error", e.what()}};
    }
}

void MatchService::install_routes() {
    server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        int status = 200;
        const json body = handle_health(status);
        res.status = status;
        res.set_content(body.dump(), "application/json");
    });
    server_->Post("/match", [this](const httplib::Request& req, httplib::Response& res) {
        int status = 200;
        json body;
        json parsed = json::parse(req.body, nullptr, false);
        if (parsed.is_discarded()) {
            status = 400;
            body = json{{"error", "request body is not valid JSON"}};
        } else {
            body = handle_match(parsed, status);
        }
        res.status = status;
        res.set_content(body.dump(), "application/json");
    });
}

int MatchService::start(const std::string& host) {
    const int port = server_->bind_to_any_port(host);
    if (port < 0) {
        throw std::runtime_error("cannot bind to " + host);
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

bool MatchService::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

void MatchService::stop() {
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace affmatch

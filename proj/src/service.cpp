#include "ebshrink/service.hpp"

#include <condition_variable>
#include <system_error>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "ebshrink/errors.hpp"
#include "ebshrink/estimators.hpp"
#include "ebshrink/math.hpp"

namespace ebshrink {

namespace {

using nlohmann::json;

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

AdjustRequest parse_adjust_request(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid request JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("request must be a JSON object");

  AdjustRequest req;
  try {
    req.ns = doc.at("namespace").get<std::string>();
    const std::string estimator = doc.at("estimator").get<std::string>();
    if (estimator == "global") {
      req.estimator = Estimator::kGlobal;
    } else if (estimator == "hybrid") {
      req.estimator = Estimator::kHybrid;
    } else {
      throw InvalidInput("estimator must be 'global' or 'hybrid'");
    }
    req.level = doc.at("level").get<double>();
    const json& exps = doc.at("experiments");
    if (!exps.is_array()) throw InvalidInput("experiments must be an array");
    for (const json& item : exps) {
      AdjustRequestItem out;
      out.id = item.at("id").get<std::string>();
      out.theta_hat = item.at("theta_hat").get<double>();
      out.sigma_hat = item.at("sigma_hat").get<double>();
      req.experiments.push_back(std::move(out));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed request: ") + e.what());
  }
  return req;
}

// Serialized by hand so that every number goes through format_double: the
// service and the CLI must emit digit-identical values for the same inputs.
std::string serialize_adjust_response(const AdjustResponse& response) {
  std::string out = "{\"results\":[";
  for (std::size_t i = 0; i < response.results.size(); ++i) {
    const AdjustResponseItem& r = response.results[i];
    if (i) out += ',';
    out += "{\"id\":\"" + json_escape(r.id) + "\"";
    out += ",\"posterior_mean\":" + format_double(r.posterior_mean);
    out += ",\"posterior_variance\":" + format_double(r.posterior_variance);
    out += ",\"lambda_used\":" + format_double(r.lambda_used);
    out += ",\"interval_lo\":" + format_double(r.interval_lo);
    out += ",\"interval_hi\":" + format_double(r.interval_hi);
    out += "}";
  }
  out += "],\"hyperparams_fitted_at\":\"" +
         json_escape(response.hyperparams_fitted_at) + "\"}";
  return out;
}

std::string serialize_health(const HealthReport& health) {
  json doc;
  doc["status"] = health.status;
  doc["store_generation"] = health.store_generation;
  doc["namespaces_loaded"] = health.namespaces_loaded;
  doc["stale"] = health.stale;
  return doc.dump();
}

AdjustService::AdjustService(std::filesystem::path store_path,
                             std::chrono::seconds reload_interval)
    : store_path_(std::move(store_path)),
      snapshot_(std::make_shared<Snapshot>()),
      reload_interval_(reload_interval) {
  try_load(/*initial=*/true);
  if (reload_interval_.count() > 0) {
    reload_thread_ = std::thread([this] {
      std::unique_lock lock(stop_mutex_);
      while (!stopping_) {
        if (stop_cv_.wait_for(lock, reload_interval_,
                              [this] { return stopping_; })) {
          break;
        }
        lock.unlock();
        try_load(/*initial=*/false);
        lock.lock();
      }
    });
  }
}

AdjustService::~AdjustService() {
  {
    std::lock_guard lock(stop_mutex_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (reload_thread_.joinable()) reload_thread_.join();
}

std::shared_ptr<const AdjustService::Snapshot> AdjustService::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

void AdjustService::try_load(bool /*initial*/) {
  Snapshot next;
  try {
    next.store = load_store(store_path_);
  } catch (const std::exception&) {
    std::lock_guard lock(mutex_);
    degraded_ = true;
    return;  // keep the last good snapshot
  }
  std::error_code ec;
  next.have_stamp = true;
  next.file_size = std::filesystem::file_size(store_path_, ec);
  next.file_mtime = std::filesystem::last_write_time(store_path_, ec);

  std::lock_guard lock(mutex_);
  next.generation = snapshot_->generation + 1;
  snapshot_ = std::make_shared<const Snapshot>(std::move(next));
  degraded_ = false;
}

void AdjustService::reload_now() { try_load(/*initial=*/false); }

AdjustResponse AdjustService::handle_adjust(const AdjustRequest& request) const {
  const auto snap = snapshot();
  const auto it = snap->store.namespaces.find(request.ns);
  if (it == snap->store.namespaces.end()) {
    throw NotFoundError("namespace not found: " + request.ns);
  }
  if (request.experiments.empty()) {
    throw InvalidInput("experiments list must be non-empty");
  }
  if (!(request.level > 0.0 && request.level < 1.0)) {
    throw InvalidInput("level must lie in (0,1)");
  }
  const StoredHyper& stored = it->second;

  AdjustResponse response;
  response.hyperparams_fitted_at = stored.fitted_at;
  response.results.reserve(request.experiments.size());
  for (std::size_t i = 0; i < request.experiments.size(); ++i) {
    const AdjustRequestItem& item = request.experiments[i];
    ExperimentSummary exp;
    exp.id = item.id;
    exp.theta_hat = item.theta_hat;
    exp.sigma_hat = item.sigma_hat;
    try {
      exp.validate();
      const PosteriorSummary post =
          request.estimator == Estimator::kGlobal
              ? global_posterior(exp, stored.hyper, request.level)
              : hybrid_posterior(exp, stored.hyper, request.level);
      response.results.push_back({item.id, post.mean, post.variance,
                                  post.lambda_used, post.interval_lo,
                                  post.interval_hi});
    } catch (const InvalidInput& e) {
      throw InvalidInput("experiments[" + std::to_string(i) +
                         "]: " + std::string(e.what()));
    }
  }
  return response;
}

HealthReport AdjustService::handle_health() const {
  std::shared_ptr<const Snapshot> snap;
  bool degraded;
  {
    std::lock_guard lock(mutex_);
    snap = snapshot_;
    degraded = degraded_;
  }
  HealthReport health;
  health.status = degraded ? "degraded" : "ok";
  health.store_generation = snap->generation;
  for (const auto& [ns, _] : snap->store.namespaces) {
    health.namespaces_loaded.push_back(ns);
  }
  // Freshness probe: flag when the file on disk no longer matches the
  // snapshot we serve from.
  std::error_code ec;
  const bool exists = std::filesystem::exists(store_path_, ec) && !ec;
  if (!snap->have_stamp) {
    health.stale = exists;  // there is a file we have not loaded
  } else if (!exists) {
    health.stale = true;
  } else {
    const auto size = std::filesystem::file_size(store_path_, ec);
    const auto mtime = std::filesystem::last_write_time(store_path_, ec);
    health.stale = ec || size != snap->file_size || mtime != snap->file_mtime;
  }
  return health;
}

void attach_routes(httplib::Server& server, const AdjustService& service) {
  server.Post("/adjust", [&service](const httplib::Request& req,
                                    httplib::Response& res) {
    try {
      const AdjustRequest request = parse_adjust_request(req.body);
      const AdjustResponse response = service.handle_adjust(request);
      res.status = 200;
      res.set_content(serialize_adjust_response(response), "application/json");
    } catch (const NotFoundError& e) {
      res.status = 404;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const InvalidInput& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  server.Get("/health", [&service](const httplib::Request&,
                                   httplib::Response& res) {
    res.status = 200;
    res.set_content(serialize_health(service.handle_health()),
                    "application/json");
  });
}

int serve_http(const std::filesystem::path& store_path, const std::string& host,
               int port, std::chrono::seconds reload_interval) {
  AdjustService service(store_path, reload_interval);
  httplib::Server server;
  attach_routes(server, service);
  return server.listen(host, port) ? 0 : 1;
}

}  // namespace ebshrink

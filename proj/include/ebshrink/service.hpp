#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ebshrink/simlab.hpp"
#include "ebshrink/store.hpp"
#include "ebshrink/types.hpp"

namespace httplib {
class Server;
}

namespace ebshrink {

struct AdjustRequestItem {
  std::string id;
  double theta_hat = 0.0;
  double sigma_hat = 0.0;
};

struct AdjustRequest {
  std::string ns;
  std::vector<AdjustRequestItem> experiments;
  Estimator estimator = Estimator::kHybrid;  // global or hybrid
  double level = 0.9;
};

struct AdjustResponseItem {
  std::string id;
  double posterior_mean = 0.0;
  double posterior_variance = 0.0;
  double lambda_used = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

struct AdjustResponse {
  std::vector<AdjustResponseItem> results;  // request order
  std::string hyperparams_fitted_at;
};

struct HealthReport {
  std::string status;  // "ok" or "degraded"
  std::uint64_t store_generation = 0;
  std::vector<std::string> namespaces_loaded;
  bool stale = false;  // store file missing/changed since the loaded snapshot
};

// The adjustment endpoint's engine: an immutable store snapshot swapped on
// reload, plus pure request handlers. Requests observe the snapshot they
// started with.
class AdjustService {
 public:
  // reload_interval zero disables the background reload thread (reload_now()
  // still works). A failed initial load leaves the service degraded with an
  // empty store; it still responds.
  explicit AdjustService(std::filesystem::path store_path,
                         std::chrono::seconds reload_interval =
                             std::chrono::seconds(60));
  ~AdjustService();

  AdjustService(const AdjustService&) = delete;
  AdjustService& operator=(const AdjustService&) = delete;

  AdjustResponse handle_adjust(const AdjustRequest& request) const;
  HealthReport handle_health() const;

  void reload_now();

 private:
  struct Snapshot {
    HyperStore store;
    std::uint64_t generation = 0;
    bool have_stamp = false;
    std::uintmax_t file_size = 0;
    std::filesystem::file_time_type file_mtime{};
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  void try_load(bool initial);

  std::filesystem::path store_path_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  bool degraded_ = false;

  std::chrono::seconds reload_interval_;
  std::thread reload_thread_;
  mutable std::mutex stop_mutex_;
  std::condition_variable_any stop_cv_;
  bool stopping_ = false;
};

// JSON wire format helpers; exposed for tests and shared by the HTTP layer.
AdjustRequest parse_adjust_request(const std::string& body);
std::string serialize_adjust_response(const AdjustResponse& response);
std::string serialize_health(const HealthReport& health);

// Registers POST /adjust and GET /health on an httplib server.
void attach_routes(httplib::Server& server, const AdjustService& service);

// Builds the service and blocks serving HTTP. Returns when the listener
// stops.
int serve_http(const std::filesystem::path& store_path, const std::string& host,
               int port, std::chrono::seconds reload_interval);

}  // namespace ebshrink

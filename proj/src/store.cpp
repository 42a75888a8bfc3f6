#include "ebshrink/store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ebshrink/errors.hpp"

namespace ebshrink {

namespace {

using nlohmann::json;

struct FileStamp {
  bool exists = false;
  std::uintmax_t size = 0;
  std::filesystem::file_time_type mtime{};

  bool operator==(const FileStamp&) const = default;
};

FileStamp stamp_of(const std::filesystem::path& path) {
  std::error_code ec;
  FileStamp stamp;
  stamp.exists = std::filesystem::exists(path, ec) && !ec;
  if (stamp.exists) {
    stamp.size = std::filesystem::file_size(path, ec);
    stamp.mtime = std::filesystem::last_write_time(path, ec);
  }
  return stamp;
}

HyperStore parse_store_document(const std::string& text,
                                const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin, 1, std::string("invalid store JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(origin, 1, "store document must be a JSON object");
  }
  HyperStore store;
  for (const auto& [ns, value] : doc.items()) {
    if (!value.is_object()) {
      throw ParseError(origin, 1, "namespace '" + ns + "' must be an object");
    }
    StoredHyper entry;
    try {
      entry.hyper.m0 = value.at("m0").get<double>();
      entry.hyper.tau = value.at("tau").get<double>();
      entry.hyper.a = value.at("a").get<double>();
      entry.hyper.b = value.at("b").get<double>();
      entry.fitted_at = value.value("fitted_at", std::string{});
      entry.source = value.value("source", std::string{});
      entry.hyper.validate();
    } catch (const json::exception& e) {
      throw ParseError(origin, 1,
                       "namespace '" + ns + "': " + std::string(e.what()));
    } catch (const InvalidInput& e) {
      throw ParseError(origin, 1,
                       "namespace '" + ns + "': " + std::string(e.what()));
    }
    store.namespaces.emplace(ns, std::move(entry));
  }
  return store;
}

json to_document(const HyperStore& store) {
  json doc = json::object();
  for (const auto& [ns, entry] : store.namespaces) {
    doc[ns] = {{"m0", entry.hyper.m0},   {"tau", entry.hyper.tau},
               {"a", entry.hyper.a},     {"b", entry.hyper.b},
               {"fitted_at", entry.fitted_at}, {"source", entry.source}};
  }
  return doc;
}

}  // namespace

std::string iso8601_utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

HyperStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("store file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_store_document(buf.str(), path.string());
}

void store_hyperparams(const std::filesystem::path& path,
                       const std::string& ns, const StoredHyper& entry) {
  if (ns.empty()) throw InvalidInput("store_hyperparams: empty namespace");
  entry.hyper.validate();

  const FileStamp before = stamp_of(path);
  HyperStore store;
  if (before.exists) store = load_store(path);
  store.namespaces[ns] = entry;

  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const std::filesystem::path tmp =
      dir / (path.filename().string() + ".tmp." +
             std::to_string(static_cast<unsigned long>(::getpid())));
  {
    std::ofstream out(tmp);
    if (!out) {
      throw NotFoundError("cannot write temp store file: " + tmp.string());
    }
    out << to_document(store).dump(2) << '\n';
  }

  if (stamp_of(path) != before) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw StoreConflict("store changed during update: " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw StoreConflict("atomic rename failed for " + path.string());
  }
}

StoredHyper load_stored(const std::filesystem::path& path,
                        const std::string& ns) {
  const HyperStore store = load_store(path);
  const auto it = store.namespaces.find(ns);
  if (it == store.namespaces.end()) {
    throw NotFoundError("namespace not found in store: " + ns);
  }
  return it->second;
}

HyperParameters load_hyperparams(const std::filesystem::path& path,
                                 const std::string& ns) {
  return load_stored(path, ns).hyper;
}

}  // namespace ebshrink

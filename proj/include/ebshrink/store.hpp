#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ebshrink/types.hpp"

namespace ebshrink {

// One namespace's persisted prior configuration.
struct StoredHyper {
  HyperParameters hyper;
  std::string fitted_at;  // ISO-8601 UTC
  std::string source;
};

// A single JSON document holding all namespaces of one store file.
struct HyperStore {
  std::map<std::string, StoredHyper> namespaces;
};

// Current UTC time formatted as ISO-8601 (seconds resolution).
std::string iso8601_utc_now();

// Parses a store document. Throws NotFoundError if the file is missing and
// ParseError if it is not a valid store document.
HyperStore load_store(const std::filesystem::path& path);

// Read-modify-write of one namespace with write-temp-then-rename semantics.
// A missing store file is created. Throws StoreConflict if the file changes
// between the read and the rename (retryable).
void store_hyperparams(const std::filesystem::path& path,
                       const std::string& ns, const StoredHyper& entry);

// Loads one namespace; NotFoundError if the namespace (or file) is absent.
StoredHyper load_stored(const std::filesystem::path& path,
                        const std::string& ns);
HyperParameters load_hyperparams(const std::filesystem::path& path,
                                 const std::string& ns);

}  // namespace ebshrink

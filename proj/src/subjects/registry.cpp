#include <map>
#include <mutex>

#include "common.h"

namespace semfuzz {

namespace {

using Factory = std::unique_ptr<Subject> (*)(const SubjectConfig&);

const std::map<std::string, Factory>& factories() {
  static const std::map<std::string, Factory> f = {
      {"v1", detail::make_v1}, {"v2", detail::make_v2}, {"v3", detail::make_v3},
      {"v4", detail::make_v4}, {"v5", detail::make_v5}, {"v6", detail::make_v6},
      {"v7", detail::make_v7}, {"v8", detail::make_v8}, {"v9", detail::make_v9},
  };
  return f;
}

}  // namespace

std::vector<std::string> subject_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, f] : factories()) ids.push_back(id);
  return ids;
}

std::unique_ptr<Subject> make_subject(const std::string& id, const SubjectConfig& config) {
  auto it = factories().find(id);
  if (it == factories().end()) throw ConfigError("unknown subject " + id + " (expected v1..v9)");
  return it->second(config);
}

const Subject& subject(const std::string& id) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Subject>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, make_subject(id)).first;
  return *it->second;
}

}  // namespace semfuzz

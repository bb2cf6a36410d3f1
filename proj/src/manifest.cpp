#include "manifest.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "io_util.hpp"
#include "tag.hpp"

namespace mt {

namespace {

constexpr const char* kToolVersion = "morphtag 1.0.0";

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

RunManifest::RunManifest(const std::string& command) {
  doc_["tool"] = kToolVersion;
  doc_["command"] = command;
  doc_["options"] = nlohmann::ordered_json::object();
  doc_["inputs"] = nlohmann::ordered_json::object();
  doc_["outputs"] = nlohmann::ordered_json::array();
  doc_["counters"] = nlohmann::ordered_json::object();
}

void RunManifest::set_option(const std::string& key,
                             const nlohmann::ordered_json& value) {
  doc_["options"][key] = value;
}

void RunManifest::add_input(const std::string& label,
                            const std::string& path) {
  std::string bytes = read_file_bytes(path);
  nlohmann::ordered_json entry;
  entry["path"] = path;
  entry["bytes"] = bytes.size();
  entry["fnv1a64"] = hex64(fnv1a64(bytes));
  doc_["inputs"][label] = entry;
}

void RunManifest::add_output(const std::string& label,
                             const std::string& path) {
  nlohmann::ordered_json entry;
  entry["label"] = label;
  entry["path"] = path;
  doc_["outputs"].push_back(entry);
}

void RunManifest::set_counter(const std::string& key, std::int64_t value) {
  doc_["counters"][key] = value;
}

std::string RunManifest::to_string() const { return doc_.dump(2); }

void RunManifest::write(const std::string& path) const {
  nlohmann::ordered_json doc = doc_;
  doc["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << doc.dump(2) << '\n';
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

}  // namespace mt

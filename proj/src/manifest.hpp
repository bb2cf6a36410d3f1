#ifndef MORPHTAG_MANIFEST_HPP
#define MORPHTAG_MANIFEST_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

namespace mt {

// A JSON record written next to each command's primary output describing the
// run: command name, configuration, input-file digests and basic counters.
// Two runs with the same inputs and settings produce manifests that differ
// only in the "timestamp" field.
class RunManifest {
 public:
  explicit RunManifest(const std::string& command);

  void set_option(const std::string& key, const nlohmann::ordered_json& value);
  // Records the FNV-1a64 digest and byte size of an input file.
  void add_input(const std::string& label, const std::string& path);
  void add_output(const std::string& label, const std::string& path);
  void set_counter(const std::string& key, std::int64_t value);

  std::string to_string() const;      // without timestamp, for tests
  void write(const std::string& path) const;  // with timestamp

 private:
  nlohmann::ordered_json doc_;
};

// Path of the manifest written beside `output_path` ("<output>.manifest.json").
std::string manifest_path_for(const std::string& output_path);

}  // namespace mt

#endif

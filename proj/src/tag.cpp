#include "tag.hpp"

#include <sstream>

namespace mt {

namespace {

void check_component(const std::string& s, const char* what) {
  if (s.empty())
    throw ParseError(std::string(what) + " must be non-empty");
  if (s.find('=') != std::string::npos || s.find('|') != std::string::npos)
    throw ParseError(std::string(what) + " '" + s +
                     "' contains a reserved character ('=' or '|')");
}

}  // namespace

MorphTag::MorphTag(std::string pos, std::set<AttributeValue> features)
    : pos_(std::move(pos)), features_(std::move(features)) {
  std::string prev;
  for (const auto& av : features_) {
    if (av.attribute == prev)
      throw ParseError("duplicate attribute '" + av.attribute + "' in tag");
    prev = av.attribute;
  }
}

std::string MorphTag::canonical() const {
  std::string out = pos_;
  for (const auto& av : features_) {
    out += '|';
    out += av.attribute;
    out += '=';
    out += av.value;
  }
  return out;
}

MorphTag MorphTag::from_canonical(const std::string& s) {
  auto bar = s.find('|');
  if (bar == std::string::npos) return MorphTag(s);
  return MorphTag(s.substr(0, bar), parse_feats(s.substr(bar + 1)));
}

MorphTag MorphTag::restricted_to(const std::set<std::string>& keep) const {
  std::set<AttributeValue> kept;
  for (const auto& av : features_)
    if (keep.count(av.attribute)) kept.insert(av);
  return MorphTag(pos_, std::move(kept));
}

std::set<AttributeValue> parse_feats(const std::string& field) {
  std::set<AttributeValue> out;
  if (field == "_" || field.empty()) return out;
  std::set<std::string> seen_attrs;
  size_t start = 0;
  size_t col = 1;
  while (start <= field.size()) {
    size_t end = field.find('|', start);
    if (end == std::string::npos) end = field.size();
    std::string pair = field.substr(start, end - start);
    size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
      throw ParseError("malformed feature pair '" + pair + "' at column " +
                       std::to_string(col));
    AttributeValue av{pair.substr(0, eq), pair.substr(eq + 1)};
    check_component(av.attribute, "attribute");
    check_component(av.value, "value");
    if (!seen_attrs.insert(av.attribute).second)
      throw ParseError("duplicate attribute '" + av.attribute +
                       "' at column " + std::to_string(col));
    out.insert(std::move(av));
    col += end - start + 1;
    start = end + 1;
  }
  return out;
}

std::string render_feats(const std::set<AttributeValue>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& av : feats) {
    if (!out.empty()) out += '|';
    out += av.attribute;
    out += '=';
    out += av.value;
  }
  return out;
}

int TagInventory::add(const MorphTag& tag) {
  std::string key = tag.canonical();
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(tags_.size());
  tags_.push_back(tag);
  index_.emplace(std::move(key), id);
  return id;
}

int TagInventory::lookup(const MorphTag& tag) const {
  return lookup_canonical(tag.canonical());
}

int TagInventory::lookup_canonical(const std::string& canonical) const {
  auto it = index_.find(canonical);
  return it == index_.end() ? -1 : it->second;
}

std::set<std::string> TagInventory::attribute_types() const {
  std::set<std::string> out;
  for (const auto& t : tags_)
    for (const auto& av : t.features()) out.insert(av.attribute);
  return out;
}

std::set<AttributeValue> TagInventory::attribute_values() const {
  std::set<AttributeValue> out;
  for (const auto& t : tags_)
    for (const auto& av : t.features()) out.insert(av);
  return out;
}

}  // namespace mt

#ifndef MORPHTAG_TAG_HPP
#define MORPHTAG_TAG_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mt {

// Thrown on malformed input files; message carries line/column context where
// available.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// One morphological attribute-value pair, e.g. Case=Nom.
struct AttributeValue {
  std::string attribute;
  std::string value;

  bool operator==(const AttributeValue& o) const = default;
  bool operator<(const AttributeValue& o) const {
    if (attribute != o.attribute) return attribute < o.attribute;
    return value < o.value;
  }
};

// A composite morphological tag: a POS plus a set of attribute-value pairs,
// at most one value per attribute. Equality is on the canonical string form.
class MorphTag {
 public:
  MorphTag() = default;
  explicit MorphTag(std::string pos) : pos_(std::move(pos)) {}
  MorphTag(std::string pos, std::set<AttributeValue> features);

  const std::string& pos() const { return pos_; }
  const std::set<AttributeValue>& features() const { return features_; }

  // POS followed by sorted attr=value pairs joined with "|", e.g.
  // "NOUN|Case=Nom|Number=Sing". A bare POS renders as just the POS.
  std::string canonical() const;

  // Inverse of canonical().
  static MorphTag from_canonical(const std::string& s);

  // Keeps only features whose attribute is in `keep`; POS is untouched.
  MorphTag restricted_to(const std::set<std::string>& keep) const;

  bool operator==(const MorphTag& o) const {
    return pos_ == o.pos_ && features_ == o.features_;
  }
  bool operator<(const MorphTag& o) const {
    if (pos_ != o.pos_) return pos_ < o.pos_;
    return features_ < o.features_;
  }

 private:
  std::string pos_;
  std::set<AttributeValue> features_;
};

// Parses a UD FEATS field: "_" or "attr=val" pairs joined by "|".
// Duplicate attributes or malformed pairs raise ParseError.
std::set<AttributeValue> parse_feats(const std::string& field);

// Renders a feature set in FEATS form ("_" when empty).
std::string render_feats(const std::set<AttributeValue>& feats);

// Dense index over the distinct tags of a corpus, in first-occurrence order.
class TagInventory {
 public:
  // Returns the index of `tag`, inserting it if absent.
  int add(const MorphTag& tag);

  // Index of a known tag, or -1.
  int lookup(const MorphTag& tag) const;
  int lookup_canonical(const std::string& canonical) const;

  const MorphTag& tag_at(int index) const { return tags_.at(index); }
  int size() const { return static_cast<int>(tags_.size()); }

  const std::vector<MorphTag>& tags() const { return tags_; }

  // Attribute names / attribute-value pairs occurring in the stored tags.
  std::set<std::string> attribute_types() const;
  std::set<AttributeValue> attribute_values() const;

 private:
  std::vector<MorphTag> tags_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace mt

#endif

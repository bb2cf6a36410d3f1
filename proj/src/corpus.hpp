#ifndef MORPHTAG_CORPUS_HPP
#define MORPHTAG_CORPUS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tag.hpp"

namespace mt {

struct Token {
  std::string surface;
  std::optional<MorphTag> gold;
  std::optional<MorphTag> predicted;
  // The original 10 columns, kept verbatim for write-through. Empty for
  // tokens built from raw text.
  std::vector<std::string> columns;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string id;  // optional, from "# sent_id = ..." comments
  std::vector<std::string> comments;

  size_t size() const { return tokens.size(); }
};

using Corpus = std::vector<Sentence>;

struct CorpusReadStats {
  size_t sentences_read = 0;
  size_t sentences_excluded = 0;  // over the length cap
};

inline constexpr int kDefaultMaxSentenceLength = 80;

// Reads a UD-style annotated corpus: 10 tab-separated columns, "#" comments,
// blank-line sentence separators. Multi-word-token ranges ("1-2") and empty
// nodes ("1.1") are skipped. Each token gets gold = MorphTag(UPOS, FEATS).
// Sentences longer than max_len are dropped and counted.
Corpus parse_corpus(std::istream& in, int max_len = kDefaultMaxSentenceLength,
                    CorpusReadStats* stats = nullptr);
Corpus parse_corpus_text(const std::string& text,
                         int max_len = kDefaultMaxSentenceLength,
                         CorpusReadStats* stats = nullptr);
Corpus load_corpus(const std::string& path,
                   int max_len = kDefaultMaxSentenceLength,
                   CorpusReadStats* stats = nullptr);

// Writes the corpus back in the annotated format. Interpreted columns (FORM,
// UPOS, FEATS) are regenerated from the token; the rest are written verbatim
// when present, "_" otherwise. With use_predicted, UPOS/FEATS come from the
// predicted tag.
void write_corpus(std::ostream& out, const Corpus& corpus,
                  bool use_predicted = false);
void save_corpus(const std::string& path, const Corpus& corpus,
                 bool use_predicted = false);

// Raw-text format: one tokenized sentence per line, tokens space-separated.
Corpus parse_raw(std::istream& in, int max_len = kDefaultMaxSentenceLength,
                 CorpusReadStats* stats = nullptr);
Corpus load_raw(const std::string& path,
                int max_len = kDefaultMaxSentenceLength,
                CorpusReadStats* stats = nullptr);

// Inventory of the distinct gold tags, indexed in first-occurrence order.
// Every token must carry a gold tag; an empty corpus is an error.
TagInventory build_tag_inventory(const Corpus& corpus);

// Filters every gold tag's features to attributes in `keep`; POS unchanged.
Corpus restrict_to_attribute_types(Corpus corpus,
                                   const std::set<std::string>& keep);

}  // namespace mt

#endif

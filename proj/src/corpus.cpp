#include "corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mt {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void flush_sentence(Corpus& out, Sentence& sent, int max_len,
                    CorpusReadStats* stats) {
  if (sent.tokens.empty() && sent.comments.empty()) return;
  if (!sent.tokens.empty()) {
    if (stats) stats->sentences_read++;
    if (max_len > 0 && static_cast<int>(sent.tokens.size()) > max_len) {
      if (stats) stats->sentences_excluded++;
    } else {
      out.push_back(std::move(sent));
    }
  }
  sent = Sentence{};
}

}  // namespace

Corpus parse_corpus(std::istream& in, int max_len, CorpusReadStats* stats) {
  Corpus out;
  Sentence sent;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_sentence(out, sent, max_len, stats);
      continue;
    }
    if (line[0] == '#') {
      sent.comments.push_back(line);
      const std::string key = "# sent_id =";
      if (line.rfind(key, 0) == 0) sent.id = trim(line.substr(key.size()));
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ParseError("line " + std::to_string(lineno) + ": expected 10 "
                       "columns, found " + std::to_string(cols.size()));
    // Skip multi-word token ranges and empty nodes.
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos ||
        id.find('.') != std::string::npos)
      continue;
    Token tok;
    tok.surface = trim(cols[1]);
    if (tok.surface.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty FORM");
    try {
      tok.gold = MorphTag(cols[3], parse_feats(cols[5]));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    tok.columns = std::move(cols);
    sent.tokens.push_back(std::move(tok));
  }
  flush_sentence(out, sent, max_len, stats);
  return out;
}

Corpus parse_corpus_text(const std::string& text, int max_len,
                         CorpusReadStats* stats) {
  std::istringstream in(text);
  return parse_corpus(in, max_len, stats);
}

Corpus load_corpus(const std::string& path, int max_len,
                   CorpusReadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_corpus(in, max_len, stats);
}

void write_corpus(std::ostream& out, const Corpus& corpus,
                  bool use_predicted) {
  for (const auto& sent : corpus) {
    for (const auto& c : sent.comments) out << c << '\n';
    for (size_t i = 0; i < sent.tokens.size(); ++i) {
      const Token& tok = sent.tokens[i];
      std::vector<std::string> cols = tok.columns;
      if (cols.size() != 10) {
        cols.assign(10, "_");
        cols[0] = std::to_string(i + 1);
      }
      cols[1] = tok.surface;
      const std::optional<MorphTag>& tag =
          use_predicted ? tok.predicted : tok.gold;
      if (tag) {
        cols[3] = tag->pos();
        cols[5] = render_feats(tag->features());
      }
      for (size_t c = 0; c < cols.size(); ++c) {
        if (c) out << '\t';
        out << cols[c];
      }
      out << '\n';
    }
    out << '\n';
  }
}

void save_corpus(const std::string& path, const Corpus& corpus,
                 bool use_predicted) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  write_corpus(out, corpus, use_predicted);
}

Corpus parse_raw(std::istream& in, int max_len, CorpusReadStats* stats) {
  Corpus out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    Sentence sent;
    std::istringstream words(line);
    std::string w;
    while (words >> w) sent.tokens.push_back(Token{w, std::nullopt, {}, {}});
    if (stats) stats->sentences_read++;
    if (max_len > 0 && static_cast<int>(sent.tokens.size()) > max_len) {
      if (stats) stats->sentences_excluded++;
      continue;
    }
    out.push_back(std::move(sent));
  }
  return out;
}

Corpus load_raw(const std::string& path, int max_len, CorpusReadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open text file: " + path);
  return parse_raw(in, max_len, stats);
}

TagInventory build_tag_inventory(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("cannot build tag inventory: empty corpus");
  TagInventory inv;
  for (const auto& sent : corpus)
    for (const auto& tok : sent.tokens) {
      if (!tok.gold)
        throw DataError("untagged token '" + tok.surface +
                        "' while building tag inventory");
      inv.add(*tok.gold);
    }
  return inv;
}

Corpus restrict_to_attribute_types(Corpus corpus,
                                   const std::set<std::string>& keep) {
  for (auto& sent : corpus)
    for (auto& tok : sent.tokens) {
      if (tok.gold) tok.gold = tok.gold->restricted_to(keep);
      if (tok.predicted) tok.predicted = tok.predicted->restricted_to(keep);
    }
  return corpus;
}

}  // namespace mt

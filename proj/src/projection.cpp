#include "projection.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mt {

const MorphTag* source_tag(const Token& tok) {
  if (tok.predicted) return &*tok.predicted;
  if (tok.gold) return &*tok.gold;
  return nullptr;
}

std::vector<AlignmentLink> select_links(
    const std::vector<AlignmentLink>& links) {
  std::unordered_map<int, AlignmentLink> best;
  for (const auto& l : links) {
    auto it = best.find(l.tgt);
    if (it == best.end()) {
      best.emplace(l.tgt, l);
      continue;
    }
    double m_new = std::min(l.p_fwd, l.p_rev);
    double m_old = std::min(it->second.p_fwd, it->second.p_rev);
    if (m_new > m_old || (m_new == m_old && l.src < it->second.src))
      it->second = l;
  }
  std::vector<AlignmentLink> out;
  out.reserve(best.size());
  for (const auto& [tgt, l] : best) out.push_back(l);
  std::sort(out.begin(), out.end(),
            [](const AlignmentLink& a, const AlignmentLink& b) {
              return a.tgt < b.tgt;
            });
  return out;
}

std::map<std::string, TagDistribution> accumulate_type_distributions(
    const std::vector<SentencePair>& pairs) {
  std::map<std::string, TagDistribution> out;
  for (const auto& pair : pairs) {
    for (const auto& l : pair.links) {
      const MorphTag* tag = source_tag(pair.source.tokens.at(l.src));
      if (!tag)
        throw DataError("untagged source token under a kept link: '" +
                        pair.source.tokens.at(l.src).surface + "'");
      TagDistribution& dist = out[pair.target.tokens.at(l.tgt).surface];
      dist.counts[tag->canonical()]++;
      dist.total++;
    }
  }
  return out;
}

TypeDictionary build_type_dictionary(
    const std::map<std::string, TagDistribution>& distributions, double beta,
    const TagInventory& inventory) {
  TypeDictionary dict;
  dict.inventory = inventory;
  for (const auto& [word, dist] : distributions) {
    std::vector<int> entry;
    for (const auto& [canon, count] : dist.counts) {
      if (dist.total > 0 &&
          static_cast<double>(count) / static_cast<double>(dist.total) >=
              beta) {
        int id = dict.inventory.lookup_canonical(canon);
        if (id < 0)
          throw DataError("dictionary tag '" + canon +
                          "' missing from the inventory");
        entry.push_back(id);
      }
    }
    std::sort(entry.begin(), entry.end());
    dict.entries.emplace(word, std::move(entry));
  }
  return dict;
}

TypeDictionary make_unambiguous(const TypeDictionary& dict) {
  TypeDictionary out;
  out.inventory = dict.inventory;
  for (const auto& [word, entry] : dict.entries)
    if (entry.size() == 1) out.entries.emplace(word, entry);
  return out;
}

TypeDictionary build_oracle_dictionary(const Corpus& gold_corpus) {
  TypeDictionary dict;
  std::unordered_map<std::string, std::vector<int>> entries;
  for (const auto& sent : gold_corpus)
    for (const auto& tok : sent.tokens) {
      if (!tok.gold)
        throw DataError("untagged token '" + tok.surface +
                        "' in oracle dictionary corpus");
      int id = dict.inventory.add(*tok.gold);
      auto& entry = entries[tok.surface];
      if (std::find(entry.begin(), entry.end(), id) == entry.end())
        entry.push_back(id);
    }
  for (auto& [word, entry] : entries) std::sort(entry.begin(), entry.end());
  dict.entries = std::move(entries);
  return dict;
}

std::optional<MorphTag> token_constraint(const SentencePair& pair,
                                         int tgt_index) {
  for (const auto& l : pair.links) {
    if (l.tgt != tgt_index) continue;
    const MorphTag* tag = source_tag(pair.source.tokens.at(l.src));
    if (!tag)
      throw DataError("untagged source token under a kept link");
    return *tag;
  }
  return std::nullopt;
}

namespace {

std::vector<int> full_inventory(const TagInventory& inventory) {
  std::vector<int> all(inventory.size());
  for (int i = 0; i < inventory.size(); ++i) all[i] = i;
  return all;
}

}  // namespace

std::vector<int> combine_constraints(const std::optional<MorphTag>& token_c,
                                     const std::vector<int>* dict_entry,
                                     const TagInventory& inventory) {
  // Empty entries behave as "all tags": treat them like an absent entry,
  // except that an aligned token still falls back to its token constraint.
  bool have_entry = dict_entry != nullptr && !dict_entry->empty();
  if (!token_c) {
    if (have_entry) return *dict_entry;
    return full_inventory(inventory);
  }
  int token_id = inventory.lookup(*token_c);
  if (token_id < 0)
    throw DataError("token-constraint tag '" + token_c->canonical() +
                    "' not in the inventory");
  if (!have_entry) return {token_id};
  if (std::find(dict_entry->begin(), dict_entry->end(), token_id) !=
      dict_entry->end())
    return {token_id};
  return *dict_entry;
}

namespace {

// allowed == full inventory is stored as the empty vector.
void push_position(ConstraintLattice& lat, std::vector<int> allowed,
                   int inventory_size, bool example) {
  if (static_cast<int>(allowed.size()) == inventory_size) {
    lat.allowed.emplace_back();
    lat.is_example.push_back(false);
  } else {
    lat.allowed.push_back(std::move(allowed));
    lat.is_example.push_back(example);
  }
}

}  // namespace

std::vector<ConstraintLattice> build_lattice_corpus(
    const std::vector<SentencePair>& pairs, const TypeDictionary& dictionary,
    const ProjectionConfig& config) {
  const TypeDictionary* dict = &dictionary;
  TypeDictionary unambiguous;
  if (config.constraint_mode == ConstraintMode::kUnambiguousType) {
    unambiguous = make_unambiguous(dictionary);
    dict = &unambiguous;
  }
  const TagInventory& inv = dict->inventory;
  std::vector<ConstraintLattice> out;
  long long tokens = 0;
  for (const auto& pair : pairs) {
    long long n = static_cast<long long>(pair.target.tokens.size());
    if (config.max_train_tokens > 0 && tokens + n > config.max_train_tokens)
      break;
    tokens += n;
    ConstraintLattice lat;
    lat.sentence = pair.target;
    for (int j = 0; j < static_cast<int>(pair.target.tokens.size()); ++j) {
      const std::vector<int>* entry =
          dict->entry(pair.target.tokens[j].surface);
      if (config.constraint_mode == ConstraintMode::kTypeAndToken) {
        push_position(lat, combine_constraints(token_constraint(pair, j),
                                               entry, inv),
                      inv.size(), true);
      } else {
        // type / unambiguous: token constraints ignored.
        if (entry && !entry->empty())
          push_position(lat, *entry, inv.size(), true);
        else
          push_position(lat, {}, 0, false);  // unconstrained
      }
    }
    out.push_back(std::move(lat));
  }
  return out;
}

std::vector<ConstraintLattice> lattices_from_dictionary(
    const Corpus& corpus, const TypeDictionary& dictionary,
    long long max_train_tokens) {
  std::vector<ConstraintLattice> out;
  long long tokens = 0;
  for (const auto& sent : corpus) {
    long long n = static_cast<long long>(sent.tokens.size());
    if (max_train_tokens > 0 && tokens + n > max_train_tokens) break;
    tokens += n;
    ConstraintLattice lat;
    lat.sentence = sent;
    for (const auto& tok : sent.tokens) {
      const std::vector<int>* entry = dictionary.entry(tok.surface);
      if (entry && !entry->empty())
        push_position(lat, *entry, dictionary.inventory.size(), true);
      else
        push_position(lat, {}, 0, false);
    }
    out.push_back(std::move(lat));
  }
  return out;
}

std::vector<ConstraintLattice> lattices_from_gold(
    const Corpus& corpus, const TagInventory& inventory,
    long long max_train_tokens) {
  std::vector<ConstraintLattice> out;
  long long tokens = 0;
  for (const auto& sent : corpus) {
    long long n = static_cast<long long>(sent.tokens.size());
    if (max_train_tokens > 0 && tokens + n > max_train_tokens) break;
    tokens += n;
    ConstraintLattice lat;
    lat.sentence = sent;
    for (const auto& tok : sent.tokens) {
      if (!tok.gold)
        throw DataError("untagged token '" + tok.surface +
                        "' in gold training corpus");
      int id = inventory.lookup(*tok.gold);
      if (id < 0)
        throw DataError("gold tag '" + tok.gold->canonical() +
                        "' not in the inventory");
      push_position(lat, {id}, inventory.size(), true);
    }
    out.push_back(std::move(lat));
  }
  return out;
}

void write_dictionary(std::ostream& out, const TypeDictionary& dict) {
  std::vector<const std::string*> words;
  words.reserve(dict.entries.size());
  for (const auto& [w, e] : dict.entries) words.push_back(&w);
  std::sort(words.begin(), words.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* w : words) {
    out << *w;
    for (int id : dict.entries.at(*w))
      out << '\t' << dict.inventory.tag_at(id).canonical();
    out << '\n';
  }
}

void save_dictionary(const std::string& path, const TypeDictionary& dict) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dictionary file: " + path);
  write_dictionary(out, dict);
}

TypeDictionary parse_dictionary(std::istream& in) {
  TypeDictionary dict;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
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
    std::vector<int> entry;
    for (size_t c = 1; c < cols.size(); ++c)
      entry.push_back(dict.inventory.add(MorphTag::from_canonical(cols[c])));
    std::sort(entry.begin(), entry.end());
    entry.erase(std::unique(entry.begin(), entry.end()), entry.end());
    dict.entries.emplace(cols[0], std::move(entry));
  }
  return dict;
}

TypeDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file: " + path);
  return parse_dictionary(in);
}

void write_lattices(std::ostream& out, const TagInventory& inventory,
                    const std::vector<ConstraintLattice>& lattices) {
  out << "#LATTICES v1\n";
  for (const auto& tag : inventory.tags())
    out << "#TAG\t" << tag.canonical() << '\n';
  for (const auto& lat : lattices) {
    for (size_t i = 0; i < lat.sentence.tokens.size(); ++i) {
      out << lat.sentence.tokens[i].surface << '\t';
      if (lat.allowed[i].empty()) {
        out << '*';
      } else {
        for (size_t k = 0; k < lat.allowed[i].size(); ++k) {
          if (k) out << ',';
          out << lat.allowed[i][k];
        }
      }
      out << '\n';
    }
    out << '\n';
  }
}

void save_lattices(const std::string& path, const TagInventory& inventory,
                   const std::vector<ConstraintLattice>& lattices) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write lattice file: " + path);
  write_lattices(out, inventory, lattices);
}

std::pair<TagInventory, std::vector<ConstraintLattice>> parse_lattices(
    std::istream& in) {
  TagInventory inv;
  std::vector<ConstraintLattice> lattices;
  ConstraintLattice current;
  std::string line;
  size_t lineno = 0;
  bool saw_header = false;
  auto flush = [&]() {
    if (!current.sentence.tokens.empty()) {
      lattices.push_back(std::move(current));
      current = ConstraintLattice{};
    }
  };
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.rfind("#LATTICES", 0) == 0) {
      saw_header = true;
      continue;
    }
    if (line.rfind("#TAG\t", 0) == 0) {
      inv.add(MorphTag::from_canonical(line.substr(5)));
      continue;
    }
    if (!saw_header)
      throw ParseError("lattice file: missing #LATTICES header");
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("lattice line " + std::to_string(lineno) +
                       ": expected token<TAB>allowed");
    Token tok;
    tok.surface = line.substr(0, tab);
    current.sentence.tokens.push_back(tok);
    std::string spec = line.substr(tab + 1);
    if (spec == "*") {
      current.allowed.emplace_back();
      current.is_example.push_back(false);
    } else {
      std::vector<int> allowed;
      std::istringstream ids(spec);
      std::string part;
      while (std::getline(ids, part, ','))
        allowed.push_back(std::stoi(part));
      for (int id : allowed)
        if (id < 0 || id >= inv.size())
          throw ParseError("lattice line " + std::to_string(lineno) +
                           ": tag index out of range");
      current.allowed.push_back(std::move(allowed));
      current.is_example.push_back(true);
    }
  }
  flush();
  return {std::move(inv), std::move(lattices)};
}

std::pair<TagInventory, std::vector<ConstraintLattice>> load_lattices(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lattice file: " + path);
  return parse_lattices(in);
}

}  // namespace mt

#include "eval.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace mt {

namespace {

void collect(const Corpus& corpus, std::set<std::string>& types,
             std::set<AttributeValue>& values, std::set<std::string>& pos) {
  for (const auto& sent : corpus)
    for (const auto& tok : sent.tokens) {
      if (!tok.gold)
        throw DataError("untagged token '" + tok.surface +
                        "' in evaluation training corpus");
      pos.insert(tok.gold->pos());
      for (const auto& av : tok.gold->features()) {
        types.insert(av.attribute);
        values.insert(av);
      }
    }
}

}  // namespace

EvalConfig derive_eval_config(EvalMode mode, const Corpus& source_train,
                              const Corpus& target_train) {
  std::set<std::string> src_types, tgt_types;
  std::set<AttributeValue> src_values, tgt_values;
  std::set<std::string> src_pos, tgt_pos;
  collect(source_train, src_types, src_values, src_pos);
  collect(target_train, tgt_types, tgt_values, tgt_pos);

  EvalConfig config;
  config.mode = mode;
  for (const auto& t : src_types)
    if (tgt_types.count(t)) config.shared_attribute_types.insert(t);
  for (const auto& v : src_values)
    if (tgt_values.count(v)) config.shared_attribute_values.insert(v);
  for (const auto& p : src_pos)
    if (tgt_pos.count(p))
      config.shared_attribute_values.insert(AttributeValue{kPosAttribute, p});
  config.target_pos_inventory = tgt_pos;
  return config;
}

std::string standard_remap_pos(
    const std::string& predicted_pos,
    const std::set<std::string>& target_pos_inventory) {
  if (target_pos_inventory.count(predicted_pos)) return predicted_pos;
  std::string mapped;
  if (predicted_pos == "PROPN")
    mapped = "NOUN";
  else if (predicted_pos == "SYM" || predicted_pos == "INTJ")
    mapped = "X";
  else if (predicted_pos == "X")
    mapped = "PUNCT";
  else
    return predicted_pos;
  if (target_pos_inventory.count(mapped)) return mapped;
  // Second stage of the chain: SYM and X fall back to PUNCT.
  if ((predicted_pos == "SYM" || mapped == "X") &&
      target_pos_inventory.count("PUNCT"))
    return "PUNCT";
  return predicted_pos;
}

MorphTag standard_filter(const MorphTag& tag,
                         const std::set<std::string>& shared_types) {
  return tag.restricted_to(shared_types);
}

IntersectedTag intersected_filter(
    const MorphTag& tag, const std::set<AttributeValue>& shared_values) {
  IntersectedTag out;
  if (shared_values.count(AttributeValue{kPosAttribute, tag.pos()}))
    out.pos = tag.pos();
  for (const auto& av : tag.features())
    if (shared_values.count(av)) out.features.insert(av);
  return out;
}

EvalReport score(const Corpus& gold, const Corpus& pred,
                 const EvalConfig& config) {
  if (gold.size() != pred.size())
    throw DataError("evaluation: sentence count mismatch (" +
                    std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()) + ")");

  EvalReport report;
  long long pos_correct = 0;
  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw DataError("evaluation: token count mismatch in sentence " +
                      std::to_string(s + 1));
    for (size_t i = 0; i < gold[s].tokens.size(); ++i) {
      const auto& gtok = gold[s].tokens[i];
      const auto& ptok = pred[s].tokens[i];
      if (!gtok.gold || !ptok.gold)
        throw DataError("evaluation: untagged token '" + gtok.surface + "'");
      const MorphTag& g = *gtok.gold;
      const MorphTag& p = *ptok.gold;
      report.token_count++;

      std::string pred_pos =
          standard_remap_pos(p.pos(), config.target_pos_inventory);
      if (pred_pos == g.pos()) pos_correct++;
      if (config.mode == EvalMode::kPos) continue;

      // attr -> value maps for both sides after filtering.
      std::map<std::string, std::string> gside, pside;
      if (config.mode == EvalMode::kStandard) {
        gside[kPosAttribute] = g.pos();
        pside[kPosAttribute] = pred_pos;
        MorphTag g_filtered = standard_filter(g, config.shared_attribute_types);
        for (const auto& av : g_filtered.features())
          gside[av.attribute] = av.value;
        MorphTag p_remapped(pred_pos, p.features());
        MorphTag p_filtered =
            standard_filter(p_remapped, config.shared_attribute_types);
        for (const auto& av : p_filtered.features())
          pside[av.attribute] = av.value;
      } else {
        IntersectedTag gt =
            intersected_filter(g, config.shared_attribute_values);
        IntersectedTag pt = intersected_filter(
            MorphTag(pred_pos, p.features()), config.shared_attribute_values);
        if (gt.pos) gside[kPosAttribute] = *gt.pos;
        if (pt.pos) pside[kPosAttribute] = *pt.pos;
        for (const auto& av : gt.features) gside[av.attribute] = av.value;
        for (const auto& av : pt.features) pside[av.attribute] = av.value;
      }

      std::set<std::string> attrs;
      for (const auto& [a, v] : gside) attrs.insert(a);
      for (const auto& [a, v] : pside) attrs.insert(a);
      for (const auto& a : attrs) {
        auto git = gside.find(a);
        auto pit = pside.find(a);
        AttributeScore& sc = report.per_attribute[a];
        if (git != gside.end() && pit != pside.end()) {
          if (git->second == pit->second) {
            sc.tp++;
          } else {  // mismatched value: both a false positive and a miss
            sc.fp++;
            sc.fn++;
          }
        } else if (pit != pside.end()) {
          sc.fp++;
        } else {
          sc.fn++;
        }
      }
    }
  }

  report.pos_accuracy =
      report.token_count
          ? static_cast<double>(pos_correct) / report.token_count
          : 0.0;
  if (config.mode == EvalMode::kPos) return report;

  if (config.include_unobserved_shared) {
    report.per_attribute[kPosAttribute];
    for (const auto& t : config.shared_attribute_types)
      report.per_attribute[t];
  }

  double f1_sum = 0.0;
  for (auto& [attr, sc] : report.per_attribute) {
    sc.precision = sc.tp + sc.fp ? static_cast<double>(sc.tp) / (sc.tp + sc.fp)
                                 : 0.0;
    sc.recall = sc.tp + sc.fn ? static_cast<double>(sc.tp) / (sc.tp + sc.fn)
                              : 0.0;
    sc.f1 = sc.precision + sc.recall > 0.0
                ? 2.0 * sc.precision * sc.recall / (sc.precision + sc.recall)
                : 0.0;
    f1_sum += sc.f1;
  }
  report.macro_f1 = report.per_attribute.empty()
                        ? 0.0
                        : f1_sum / report.per_attribute.size();
  return report;
}

void write_report(std::ostream& out, const EvalReport& report,
                  EvalMode mode) {
  char buf[64];
  if (mode != EvalMode::kPos) {
    for (const auto& [attr, sc] : report.per_attribute) {
      out << attr << '\t' << sc.tp << '\t' << sc.fp << '\t' << sc.fn;
      std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f", sc.precision,
                    sc.recall, sc.f1);
      out << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.6f", report.macro_f1);
    out << "MACRO_F1\t" << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f", report.pos_accuracy);
  out << "POS_ACC\t" << buf << '\n';
}

std::string format_report(const EvalReport& report, EvalMode mode) {
  std::ostringstream out;
  write_report(out, report, mode);
  return out.str();
}

}  // namespace mt

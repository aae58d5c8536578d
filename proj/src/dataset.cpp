#include "synthqa/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/mentions.hpp"

namespace synthqa {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool occurs_as_token(std::string_view text, std::string_view word) {
  if (word.empty()) return false;
  for (auto pos = text.find(word); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
    bool left = pos == 0 || !word_char(text[pos - 1]);
    bool right = pos + word.size() == text.size() || !word_char(text[pos + word.size()]);
    if (left && right) return true;
  }
  return false;
}

bool literal_matches(const TypedProgram& tp, std::string_view text) {
  for (const auto& c : tp.calls) {
    for (const auto& a : c.args) {
      if (const auto* v = std::get_if<Value>(&a); v && to_string(*v) == text) return true;
    }
  }
  return false;
}

}  // namespace

std::string apply_substitution(std::string_view text, const EntitySubstitution& s) {
  std::string out;
  const auto& w = s.original;
  if (w.empty()) return std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    auto pos = text.find(w, i);
    if (pos == std::string_view::npos) break;
    bool left = pos == 0 || !word_char(text[pos - 1]);
    bool right = pos + w.size() == text.size() || !word_char(text[pos + w.size()]);
    if (left && right) {
      out.append(text.substr(i, pos - i));
      out += s.replacement;
      i = pos + w.size();
    } else {
      out.append(text.substr(i, pos + 1 - i));
      i = pos + 1;
    }
  }
  out.append(text.substr(i));
  return out;
}

std::string perturb_question_entities(std::string_view q, Rng& rng, double p) {
  auto ms = detect_mentions(q);
  if (ms.empty() || !rng.chance(p)) return std::string(q);
  const auto& m = ms[rng.below(ms.size())];
  std::string out(q);
  out.replace(m.begin, m.end - m.begin, swap_mention_text(m.in(q), m.kind, rng));
  return out;
}

std::optional<EntitySubstitution> perturb_request_entities(GenerationRequest& request, Rng& rng, double p) {
  std::vector<Mention> candidates;
  for (const auto& m : detect_mentions(request.question)) {
    auto text = m.in(request.question);
    if (literal_matches(request.program, text)) continue;
    bool in_program = std::any_of(request.program.calls.begin(), request.program.calls.end(), [&](const auto& c) {
      return c.predicate && occurs_as_token(c.predicate->text(), text);
    });
    if (in_program) candidates.push_back(m);
  }
  if (candidates.empty() || !rng.chance(p)) return std::nullopt;
  const auto& m = candidates[rng.below(candidates.size())];
  EntitySubstitution s{std::string(m.in(request.question)), {}};
  s.replacement = swap_mention_text(s.original, m.kind, rng);
  request.question = apply_substitution(request.question, s);
  for (auto& c : request.program.calls) {
    if (c.predicate) c.predicate = Predicate(apply_substitution(c.predicate->text(), s));
  }
  return s;
}

bool in_dev_split(std::string_view question_id, double dev_fraction) {
  if (dev_fraction <= 0.0) return false;
  double u = static_cast<double>(mix64(stable_hash(question_id)) >> 11) * 0x1.0p-53;
  return u < dev_fraction;
}

double DatasetStats::acceptance_rate() const {
  return slots == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(slots);
}

double DatasetStats::top10_share() const {
  if (accepted == 0) return 0.0;
  std::vector<std::uint64_t> counts;
  for (const auto& [p, c] : pattern_counts) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  std::uint64_t top = 0;
  for (std::size_t i = 0; i < counts.size() && i < 10; ++i) top += counts[i];
  return static_cast<double>(top) / static_cast<double>(accepted);
}

std::string DatasetStats::to_json() const {
  nlohmann::ordered_json j;
  j["slots"] = slots;
  j["accepted"] = accepted;
  j["attempts"] = attempts;
  j["acceptance_rate"] = acceptance_rate();
  j["train"] = train;
  j["dev"] = dev;
  j["entity_perturbed"] = entity_perturbed;
  j["num_patterns"] = pattern_counts.size();
  j["top10_share"] = top10_share();
  j["pattern_histogram"] = pattern_counts;
  j["failure_reasons"] = failure_reasons;
  return j.dump(2);
}

namespace {

struct SlotResult {
  std::optional<GeneratedInstance> generated;
  Failure failure;
  bool entity_perturbed = false;
};

const CorpusEntry& sample_entry(const PatternIndex& corpus, const std::vector<const std::vector<std::size_t>*>& groups,
                                bool balanced, Rng& rng) {
  if (!balanced) return corpus.entries()[rng.below(corpus.size())];
  const auto& ids = *groups[rng.below(groups.size())];
  return corpus.entries()[ids[rng.below(ids.size())]];
}

}  // namespace

DatasetStats generate_dataset(const PatternIndex& corpus, const DatasetConfig& cfg, const InstanceSink& sink,
                              const TemplateSet& templates) {
  if (corpus.empty()) throw CorpusEmpty();
  cfg.generation.validate();
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [p, ids] : corpus.patterns()) groups.push_back(&ids);
  const PredicatePool pool = predicate_pool(corpus);
  const std::uint64_t max_slots = cfg.max_slots ? cfg.max_slots : 50 * cfg.target_size + 1000;
  const int workers = std::max(1, cfg.workers);
  const std::size_t batch = std::max<std::size_t>(32, static_cast<std::size_t>(workers) * 8);

  auto run_slot = [&](std::uint64_t s) {
    SlotResult r;
    Rng rng(derive_seed(cfg.seed, "slot", s));
    const auto& e = sample_entry(corpus, groups, cfg.balanced, rng);
    GenerationRequest req{e.decomposition.question_text, e.decomposition.question_id, e.decomposition.source_dataset,
                          e.program};
    r.entity_perturbed = perturb_request_entities(req, rng, cfg.entity_perturb_probability).has_value();
    std::vector<int> ns;
    for (int n : feasible_cardinalities(req.program)) {
      if (cfg.generation.answer_cardinalities.count(n)) ns.push_back(n);
    }
    if (ns.empty()) {
      r.failure.reasons["infeasible_cardinality"] = 1;
      r.failure.attempts = 1;
      return r;
    }
    int N = ns[rng.below(ns.size())];
    GenerationConfig gc = cfg.generation;
    gc.seed = derive_seed(cfg.seed, "instance", s);
    auto res = generate_instance(req, N, gc, pool, templates);
    r.failure = std::move(res.failure);
    if (res.generated) {
      auto& inst = res.generated->instance;
      if (cfg.dev_fraction > 0.0) inst.split = in_dev_split(inst.question_id, cfg.dev_fraction) ? "dev" : "train";
      else inst.split = e.split;
      r.generated = std::move(res.generated);
    }
    return r;
  };

  DatasetStats st;
  std::unordered_set<std::string> seen;
  std::uint64_t next = 0;
  std::vector<SlotResult> results;
  while (st.accepted < cfg.target_size && next < max_slots) {
    std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, max_slots - next));
    results.assign(count, SlotResult{});
    if (workers == 1) {
      for (std::size_t i = 0; i < count; ++i) results[i] = run_slot(next + i);
    } else {
      std::atomic<std::size_t> cursor{0};
      std::vector<std::thread> pool_threads;
      for (int w = 0; w < workers; ++w) {
        pool_threads.emplace_back([&] {
          for (std::size_t i = cursor++; i < count; i = cursor++) results[i] = run_slot(next + i);
        });
      }
      for (auto& t : pool_threads) t.join();
    }
    for (std::size_t i = 0; i < count && st.accepted < cfg.target_size; ++i) {
      auto& r = results[i];
      ++st.slots;
      st.attempts += static_cast<std::uint64_t>(r.failure.attempts);
      if (r.entity_perturbed) ++st.entity_perturbed;
      for (const auto& [k, v] : r.failure.reasons) st.failure_reasons[k] += static_cast<std::uint64_t>(v);
      if (!r.generated) continue;
      const auto& inst = r.generated->instance;
      if (!seen.insert(inst.id).second) {
        ++st.failure_reasons["duplicate_id"];
        continue;
      }
      ++st.accepted;
      ++st.pattern_counts[inst.pattern];
      if (inst.split == "dev") ++st.dev;
      else ++st.train;
      sink(*r.generated);
    }
    next += count;
  }
  return st;
}

}  // namespace synthqa

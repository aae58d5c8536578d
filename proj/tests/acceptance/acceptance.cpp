// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "support/touchdown_example.hpp"
#include "support/random_cases.hpp"
#include "support/skewed_corpus.hpp"
#include "synthqa/checker.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/jsonl.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/teacher.hpp"
#include "synthqa/type_inference.hpp"

namespace fs = std::filesystem;
using namespace synthqa;

namespace {

// Pinned tolerances.
constexpr std::uint64_t kGateInstances = 1000;
constexpr double kGateSeconds = 120.0;
constexpr int kMaxFacts = 25;
constexpr int kMinSteps = 2;
constexpr int kMaxSteps = 6;
constexpr std::uint64_t kBalanceInstances = 10000;
constexpr int kBalancePatterns = 20;
constexpr double kBalanceHeadShare = 0.70;
constexpr double kUnbalancedTop10Min = 0.60;
constexpr double kBalancedTop10Lo = 0.45;
constexpr double kBalancedTop10Hi = 0.55;
constexpr int kOracleCasesPerPrimitive = 1000;
constexpr std::uint64_t kTeacherPerPrimitive = 1000;
constexpr std::uint64_t kDeterminismInstances = 1000;
constexpr std::uint64_t kRangeScanInstances = 10000;

const std::string kData = SYNTHQA_DATA_DIR;
const std::string kSeedCorpus = kData + "/seed_corpus.csv";
const fs::path kScratch = SYNTHQA_SCRATCH;

struct Result {
  bool pass = false;
  std::string detail;
};

int run_cli(const std::string& args, const fs::path& stdout_file) {
  std::string cmd = std::string(SYNTHQA_CLI) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "label n/total" lines from verify.
std::map<std::string, std::pair<long, long>> verify_counts(const std::string& out) {
  std::map<std::string, std::pair<long, long>> m;
  static const std::regex line(R"((\S+) (\d+)/(\d+))");
  for (std::sregex_iterator it(out.begin(), out.end(), line), end; it != end; ++it) {
    m[(*it)[1]] = {std::stol((*it)[2]), std::stol((*it)[3])};
  }
  return m;
}

std::vector<fs::path> gate_files(const fs::path& stem) {
  return {stem.string() + ".jsonl", stem.string() + ".dev.jsonl"};
}

fs::path facts_for(const fs::path& jsonl) {
  auto s = jsonl.string();
  return s.substr(0, s.size() - 6) + ".facts.jsonl";
}

Result criterion1() {
  auto stem = kScratch / "gate";
  auto start = std::chrono::steady_clock::now();
  int rc = run_cli("--seed 1 gen-dataset --corpus " + kSeedCorpus + " --size " + std::to_string(kGateInstances) +
                       " --out " + stem.string() + ".jsonl --keep-facts",
                   kScratch / "gate.log");
  if (rc != 0) return {false, "gen-dataset exited " + std::to_string(rc)};
  long pass[3] = {0, 0, 0};
  long total = 0;
  for (const auto& f : gate_files(stem)) {
    if (!fs::exists(f)) continue;
    rc = run_cli("verify --in " + f.string() + " --facts " + facts_for(f).string(), kScratch / "verify.out");
    auto counts = verify_counts(slurp(kScratch / "verify.out"));
    if (!counts.count("P1")) return {false, "verify printed no counts for " + f.string()};
    pass[0] += counts["P1"].first;
    pass[1] += counts["P2"].first;
    pass[2] += counts["P3"].first;
    total += counts["P1"].second;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto index = ingest_corpus(kSeedCorpus);
  char buf[256];
  std::snprintf(buf, sizeof buf, "P1 %ld/%ld P2 %ld/%ld P3 %ld/%ld; corpus %zu entries, %zu patterns; %.1fs", pass[0],
                total, pass[1], total, pass[2], total, index.size(), index.patterns().size(), secs);
  bool ok = total == static_cast<long>(kGateInstances) && pass[0] == total && pass[1] == total && pass[2] == total &&
            index.size() >= 50 && index.patterns().size() >= 10 && secs < kGateSeconds;
  return {ok, buf};
}

Result criterion2() {
  long n = 0, ok_facts = 0, ok_steps = 0, ok_card = 0, ok_diff = 0;
  for (const auto& f : gate_files(kScratch / "gate")) {
    if (!fs::exists(f)) continue;
    JsonlReader reader(f.string());
    JsonlReader facts(facts_for(f).string());
    std::string line, fline;
    while (reader.next(line)) {
      auto inst = instance_from_json(line);
      if (!facts.next(fline)) return {false, "facts file shorter than " + f.string()};
      auto [id, store] = facts_from_json(fline);
      ++n;
      ok_facts += static_cast<int>(store.size()) <= kMaxFacts && inst.num_facts == static_cast<int>(store.size());
      int steps = static_cast<int>(inst.program.size());
      ok_steps += steps >= kMinSteps && steps <= kMaxSteps;
      auto gold = reference::execute_steps(inst.program, store).back();
      int card = static_cast<int>(cardinality(gold));
      ok_card += card >= 1 && card <= 4 && card == inst.cardinality;
      auto dis = reference::execute_steps(inst.perturbation.apply(inst.program), store).back();
      ok_diff += answer_strings(gold) != answer_strings(dis);
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "facts<=25 %ld/%ld, steps in [2,6] %ld/%ld, cardinality in 1..4 %ld/%ld, gold!=distractor %ld/%ld",
                ok_facts, n, ok_steps, n, ok_card, n, ok_diff, n);
  return {n == static_cast<long>(kGateInstances) && ok_facts == n && ok_steps == n && ok_card == n && ok_diff == n, buf};
}

Result criterion3() {
  auto corpus = ingest_corpus_text(testing::skewed_corpus_text(kSeedCorpus, kBalancePatterns, kBalanceHeadShare, 1000));
  auto hist = corpus.histogram();
  int head = 0;
  for (const auto& [p, c] : hist) head = std::max(head, c);
  DatasetConfig cfg;
  cfg.target_size = kBalanceInstances;
  cfg.seed = 3;
  cfg.balanced = false;
  auto skewed = generate_dataset(corpus, cfg, [](const GeneratedInstance&) {});
  cfg.balanced = true;
  auto balanced = generate_dataset(corpus, cfg, [](const GeneratedInstance&) {});
  char buf[256];
  std::snprintf(buf, sizeof buf, "corpus %zu patterns, head %.0f%%; top-10 share unbalanced %.1f%%, balanced %.1f%%",
                hist.size(), 100.0 * head / static_cast<double>(corpus.size()), 100 * skewed.top10_share(),
                100 * balanced.top10_share());
  bool ok = hist.size() == kBalancePatterns && skewed.accepted == kBalanceInstances &&
            balanced.accepted == kBalanceInstances && skewed.top10_share() >= kUnbalancedTop10Min &&
            balanced.top10_share() >= kBalancedTop10Lo && balanced.top10_share() <= kBalancedTop10Hi;
  return {ok, buf};
}

Result criterion4() {
  long mismatches = 0, cases = 0;
  std::string first;
  for (const auto& sig : registry()) {
    Rng rng(derive_seed(4, sig.name, 0));
    for (int i = 0; i < kOracleCasesPerPrimitive; ++i) {
      auto c = testing::random_case(sig.primitive, rng);
      auto a = testing::run_production(c);
      auto b = testing::run_reference(c);
      ++cases;
      if (!testing::same_outcome(a, b)) {
        if (first.empty()) first = std::string(sig.name) + ": " + testing::describe(a) + " vs " + testing::describe(b);
        ++mismatches;
      }
    }
  }
  std::string detail = std::to_string(registry().size()) + " primitives, " + std::to_string(cases) + " cases, " +
                       std::to_string(mismatches) + " mismatches";
  if (!first.empty()) detail += " (first: " + first + ")";
  return {registry().size() >= 44 && mismatches == 0, detail};
}

Result criterion5() {
  auto inst = testing::touchdown_instance();
  auto store = testing::touchdown_store();
  auto gold = execute_steps(inst.program, store).back();
  auto dis = execute_steps(inst.perturbation.apply(inst.program), store).back();
  auto report = check_instance(inst, store);
  std::string detail = render_program(inst.program) + " -> gold " + to_string(gold) + ", distractor " + to_string(dis);
  return {gold == Value::number(2) && dis == Value::number(1) && report.pass(), detail};
}

Result criterion6() {
  long n = 0, agree = 0;
  for (const auto& sig : registry()) {
    generate_primitive_instances(sig.primitive, kTeacherPerPrimitive, 0, 6, [&](const QAInstance& inst) {
      ++n;
      Rng rng(inst.seed);
      auto p = sample_primitive_problem(sig.primitive, rng);
      agree += answer_strings(reference::execute_steps(p.program, p.store).back()) == inst.answers;
    });
  }
  PrimitiveProblem ex;
  ex.primitive = PrimitiveId::kFilterCompared;
  ex.program = infer_types(parse_program_text(
      R"(select("entities") ; project(#1, "value") ; filter_a_where_b_is_compared_to(#2, ">", 948768.92))"));
  for (const char* e : {"AFE", "RQX"}) {
    ex.store.add(Fact{Predicate("entities"), std::string(kHiddenFamily), Value::entity(e), std::nullopt, Chain::kGold});
  }
  ex.store.add(Fact{Predicate("value"), "teacher_value", Value::entity("AFE"), Value::number(871781), Chain::kGold});
  ex.store.add(Fact{Predicate("value"), "teacher_value", Value::entity("RQX"), Value::number(989517.24), Chain::kGold});
  ex.grouped = {false, false, false, true};
  ex.slots = {{"cmp", "larger than"}, {"thr", "948768.92"}};
  auto inst = render_primitive_problem(ex, 0);
  bool example = inst.question == "Entities that have value larger than 948768.92?" &&
                 inst.context == "Entity AFE has value 871781. Entity RQX has value 989,517.24." &&
                 inst.answers == std::vector<std::string>{"RQX"};
  std::string detail = std::to_string(agree) + "/" + std::to_string(n) + " agree; example answers [" +
                       (inst.answers.empty() ? "" : inst.answers[0]) + "]" + (example ? "" : " (example text differs)");
  return {n == static_cast<long>(kTeacherPerPrimitive * registry().size()) && agree == n && example, detail};
}

Result criterion7() {
  auto run = [&](int workers, const char* name) {
    auto out = kScratch / name;
    int rc = run_cli("--seed 7 --workers " + std::to_string(workers) + " gen-dataset --corpus " + kSeedCorpus +
                         " --size " + std::to_string(kDeterminismInstances) + " --out " + out.string(),
                     kScratch / "det.log");
    return rc == 0 ? slurp(out) + "\x1f" + slurp(out.string().substr(0, out.string().size() - 6) + ".dev.jsonl")
                   : std::string();
  };
  auto a = run(1, "det_a.jsonl");
  auto b = run(1, "det_b.jsonl");
  auto c = run(8, "det_c.jsonl");
  bool ok = !a.empty() && a == b && a == c;
  return {ok, std::string("run 1 vs run 2: ") + (a == b ? "identical" : "differ") +
                  ", 1 vs 8 workers: " + (a == c ? "identical" : "differ") + " (" + std::to_string(a.size()) + " bytes)"};
}

Result criterion8() {
  auto corpus = ingest_corpus(kSeedCorpus);
  DatasetConfig cfg;
  cfg.target_size = kRangeScanInstances;
  cfg.seed = 8;
  long numbers = 0, dates = 0, entities = 0, bad = 0;
  std::string first_bad;
  static const std::regex entity_re("^[A-Z]{3}$");
  auto scan = [&](const Value& v) {
    bool ok = true;
    if (v.is_number()) {
      ++numbers;
      ok = v.as_number() >= kMinNumber && v.as_number() <= kMaxNumber;
    } else if (v.is_date()) {
      ++dates;
      ok = v.as_date().year >= kMinYear && v.as_date().year <= kMaxYear;
    } else if (v.is_entity()) {
      ++entities;
      ok = std::regex_match(v.as_entity(), entity_re);
    }
    if (!ok) {
      ++bad;
      if (first_bad.empty()) first_bad = to_string(v);
    }
  };
  std::uint64_t n = 0;
  generate_dataset(corpus, cfg, [&](const GeneratedInstance& g) {
    ++n;
    for (const auto& f : g.facts.facts()) {
      scan(f.subject);
      if (f.object) scan(*f.object);
    }
  });
  std::string detail = std::to_string(n) + " instances; " + std::to_string(numbers) + " numbers, " +
                       std::to_string(dates) + " dates, " + std::to_string(entities) + " entities; " +
                       std::to_string(bad) + " out of range";
  if (!first_bad.empty()) detail += " (first: " + first_bad + ")";
  return {n == kRangeScanInstances && bad == 0 && numbers > 0 && dates > 0 && entities > 0, detail};
}

Result criterion9() {
  struct Case {
    const char* question;
    const char* qdmr;
    ValueType want;
  };
  const Case cases[] = {
      {"Were there more than 1000 soldiers in USA?",
       "return number of soldiers in USA ;return if #1 is higher than 1000", ValueType::scalar(Base::kNumber)},
      {"Did India get independence before 1950?", "return when did India get independence ;return if #1 is before 1950",
       ValueType::scalar(Base::kDate)},
      {"How many countries surround India?", "return countries surrounding India ;return number of #1",
       ValueType::list(Base::kEntity)},
  };
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    auto d = make_decomposition("c9", c.question, c.qdmr);
    auto tp = infer_types(normalize(parse_decomposition(d)), c.question);
    if (!detail.empty()) detail += ", ";
    detail += tp.calls[0].predicate->text() + " -> " + to_string(tp.types[0]);
    ok = ok && tp.types[0] == c.want;
  }
  return {ok, detail};
}

}  // namespace

int main() {
  fs::create_directories(kScratch);
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"anti-shortcut gate", criterion1},
      {"generation constraints", criterion2},
      {"pattern balancing", criterion3},
      {"interpreter oracle equivalence", criterion4},
      {"touchdown worked example", criterion5},
      {"primitive teacher soundness", criterion6},
      {"determinism", criterion7},
      {"entity ranges", criterion8},
      {"select typing cases", criterion9},
  };
  int failed = 0;
  int i = 0;
  for (const auto& [name, fn] : criteria) {
    ++i;
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("criterion %d %s: %s (%s)\n", i, name, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}

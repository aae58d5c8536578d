// synthqa command line: parsing, typing, execution, generation, verification, stats.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "synthqa/checker.hpp"
#include "synthqa/corpus.hpp"
#include "synthqa/dataset.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/generator.hpp"
#include "synthqa/interpreter.hpp"
#include "synthqa/jsonl.hpp"
#include "synthqa/stats.hpp"
#include "synthqa/teacher.hpp"
#include "synthqa/type_inference.hpp"

using namespace synthqa;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;

struct Settings {
  std::uint64_t seed = 0;
  int workers = 1;
  GenerationConfig gen;
  std::vector<int> cardinalities{1, 2, 3, 4};
  std::string rules_path, templates_path, column_map, level;
  int min_steps = 2, max_steps = 6;
  std::string emit_config;

  std::optional<RuleTable> rules;
  std::optional<TemplateSet> templates;

  void finalize() {
    gen.answer_cardinalities = {cardinalities.begin(), cardinalities.end()};
    gen.seed = seed;
    gen.validate();
    if (!rules_path.empty()) rules = RuleTable::from_file(rules_path);
    if (!templates_path.empty()) templates = TemplateSet::from_file(templates_path);
  }
  const RuleTable& rule_table() const { return rules ? *rules : RuleTable::builtin(); }
  const TemplateSet& template_set() const { return templates ? *templates : TemplateSet::builtin(); }
  IngestOptions ingest() const {
    IngestOptions o;
    o.min_steps = min_steps;
    o.max_steps = max_steps;
    if (!column_map.empty()) o.columns = ColumnMap::parse(column_map);
    if (!level.empty()) {
      auto l = parse_level(level);
      if (!l) throw Error("unknown level '" + level + "'");
      o.level_filter = *l;
    }
    o.rules = rules ? &*rules : nullptr;
    return o;
  }
};

std::string facts_path_for(const std::string& out) {
  const std::string ext = ".jsonl";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + ".facts.jsonl";
  }
  return out + ".facts.jsonl";
}

std::string with_suffix(const std::string& out, const std::string& suffix) {
  const std::string ext = ".jsonl";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + suffix + ext;
  }
  return out + suffix + ext;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw IoError("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void line(const std::string& s) {
    stream() << s << '\n';
    if (!stream()) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Decomposition single_decomposition(const std::string& id, const std::string& question, const std::string& qdmr,
                                   const std::string& level) {
  Level l = Level::kHigh;
  if (!level.empty()) {
    auto parsed = parse_level(level);
    if (!parsed) throw Error("unknown level '" + level + "'");
    l = *parsed;
  }
  auto u = id.find('_');
  return make_decomposition(id, question, qdmr, l, u == std::string::npos ? std::string{} : id.substr(0, u));
}

FactStore load_store(const std::string& path, const std::string& id) {
  JsonlReader reader(path);
  std::string line;
  while (reader.next(line)) {
    auto [fid, store] = facts_from_json(line);
    if (id.empty() || fid == id) return store;
  }
  throw SchemaError("no fact record" + (id.empty() ? std::string{} : " with id '" + id + "'") + " in " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typed-program compiler and synthetic reading-comprehension data generator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key=value configuration file (flags override it)");

  Settings s;
  app.add_option("--seed", s.seed, "Root seed");
  app.add_option("--workers", s.workers, "Worker threads for generation")->check(CLI::Range(1, 256));
  app.add_option("--max-retries", s.gen.max_retries, "Grounding attempts per instance");
  app.add_option("--max-facts", s.gen.max_facts, "Fact budget per instance");
  app.add_option("--cardinalities", s.cardinalities, "Allowed answer cardinalities")->delimiter(',');
  app.add_option("--gold-pool-min", s.gen.gold_pool_min);
  app.add_option("--gold-pool-max", s.gen.gold_pool_max);
  app.add_option("--distractor-pool-min", s.gen.distractor_pool_min);
  app.add_option("--distractor-pool-max", s.gen.distractor_pool_max);
  app.add_option("--step-perturb-probability", s.gen.step_perturb_probability);
  app.add_option("--rules", s.rules_path, "Parse rule table (TSV)");
  app.add_option("--templates", s.templates_path, "Sentence/question template table (TSV)");
  app.add_option("--column-map", s.column_map, "Corpus column overrides, field=column,...");
  app.add_option("--level", s.level, "Only ingest QDMRs of this level (low|high)");
  app.add_option("--min-steps", s.min_steps);
  app.add_option("--max-steps", s.max_steps);
  app.add_option("--emit-config", s.emit_config, "Write the resolved configuration to PATH ('-' = stdout)")
      ->configurable(false);

  // parse / typecheck
  std::string question, qdmr, qid = "input", corpus, in_level;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--question", question, "Question text");
    sub->add_option("--qdmr", qdmr, "Decomposition, steps separated by ';'");
    sub->add_option("--id", qid, "Question id");
    sub->add_option("--corpus", corpus, "Corpus table instead of a single question");
    sub->add_option("--qdmr-level", in_level, "low|high for --qdmr");
  };
  auto* parse_cmd = app.add_subcommand("parse", "QDMR to normalized program");
  add_input(parse_cmd);
  auto* type_cmd = app.add_subcommand("typecheck", "QDMR to typed program");
  add_input(type_cmd);

  // execute
  std::string program_text, facts, in_path, fact_id;
  auto* exec_cmd = app.add_subcommand("execute", "Run a program over a stored fact set");
  exec_cmd->add_option("--program", program_text, "Program text");
  exec_cmd->add_option("--question", question, "Question used for type inference");
  exec_cmd->add_option("--facts", facts, "Facts JSONL")->required();
  exec_cmd->add_option("--fact-id", fact_id, "Fact record id (default: first)");
  exec_cmd->add_option("--in", in_path, "Dataset JSONL: re-execute every instance");

  // gen-instance
  std::optional<int> cardinality;
  std::string out;
  bool keep_facts = false;
  auto* gi_cmd = app.add_subcommand("gen-instance", "One instance per answer cardinality");
  std::string question_file;
  gi_cmd->add_option("--question", question);
  gi_cmd->add_option("--qdmr", qdmr);
  gi_cmd->add_option("--question-file", question_file, "Corpus table: every admitted entry");
  gi_cmd->add_option("--id", qid);
  gi_cmd->add_option("--cardinality", cardinality, "Only this N (default: try 1-4)");
  gi_cmd->add_option("--out", out, "Output JSONL ('-' = stdout)");
  gi_cmd->add_flag("--keep-facts", keep_facts, "Also write <out>.facts.jsonl");

  // gen-dataset
  std::uint64_t size = 1000;
  bool no_balance = false;
  double dev_fraction = 0.0, entity_p = 0.5;
  auto* gd_cmd = app.add_subcommand("gen-dataset", "Pattern-balanced multi-step dataset");
  gd_cmd->add_option("--corpus", corpus)->required();
  gd_cmd->add_option("--size", size, "Instances to emit");
  gd_cmd->add_flag("--no-balance", no_balance, "Sample corpus entries uniformly");
  gd_cmd->add_option("--dev-fraction", dev_fraction, "Question ids hashed into <out>.dev.jsonl");
  gd_cmd->add_option("--entity-perturb-probability", entity_p);
  gd_cmd->add_option("--out", out)->required();
  gd_cmd->add_flag("--keep-facts", keep_facts);

  // gen-primitives
  std::uint64_t train = 30000, dev = 1000;
  std::vector<std::string> primitives;
  std::string out_dir;
  auto* gp_cmd = app.add_subcommand("gen-primitives", "Single-primitive instances");
  gp_cmd->add_option("--train", train);
  gp_cmd->add_option("--dev", dev);
  gp_cmd->add_option("--primitive", primitives, "Restrict to these primitives");
  gp_cmd->add_option("--out", out_dir, "Output directory")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check P1/P2/P3 and acceptance rules");
  verify_cmd->add_option("--in", in_path)->required();
  verify_cmd->add_option("--facts", facts)->required();

  // stats
  bool as_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "Pattern and step histograms of a corpus or dataset");
  stats_cmd->add_option("--in", in_path)->required();
  stats_cmd->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kIo;
  }

  try {
    s.finalize();
    if (!s.emit_config.empty()) {
      Output cfg(s.emit_config);
      cfg.stream() << app.config_to_str(true, false);
    }

    if (parse_cmd->parsed() || type_cmd->parsed()) {
      bool typed = type_cmd->parsed();
      if (!corpus.empty()) {
        IngestStats st;
        auto index = ingest_corpus(corpus, s.ingest(), &st);
        for (const auto& e : index.entries()) {
          std::cout << e.decomposition.question_id << '\t' << render_program(e.program) << '\n';
          if (typed) std::cout << type_dump(e.program);
        }
        std::cerr << "rows " << st.rows << ", admitted " << st.admitted << ", parse failures " << st.parse_failures
                  << ", type failures " << st.type_failures << ", out of step range " << st.skipped_step_range
                  << '\n';
        return kOk;
      }
      if (question.empty() || qdmr.empty()) throw Error("--question and --qdmr (or --corpus) are required");
      auto d = single_decomposition(qid, question, qdmr, in_level);
      auto p = normalize(parse_decomposition(d, s.rule_table()));
      std::cout << render_program(p) << '\n';
      if (typed) std::cout << type_dump(infer_types(p, question));
      return kOk;
    }

    if (exec_cmd->parsed()) {
      if (!in_path.empty()) {
        JsonlReader reader(in_path), freader(facts);
        std::string line, fline;
        int total = 0, mismatched = 0;
        while (reader.next(line)) {
          auto inst = instance_from_json(line);
          if (!freader.next(fline)) throw SchemaError("facts file has fewer records than " + in_path);
          auto [fid, store] = facts_from_json(fline);
          if (fid != inst.id) throw SchemaError("fact record " + fid + " does not match instance " + inst.id);
          ++total;
          std::vector<std::string> got;
          try {
            got = answer_strings(execute_steps(inst.program, store).back());
          } catch (const ExecError& e) {
            got = {std::string("error: ") + e.what()};
          }
          if (got != inst.answers) {
            ++mismatched;
            std::cout << inst.id << ": answer mismatch\n";
          }
        }
        std::cout << total - mismatched << "/" << total << " answers reproduced\n";
        return mismatched ? kValidation : kOk;
      }
      if (program_text.empty()) throw Error("--program or --in is required");
      auto store = load_store(facts, fact_id);
      auto tp = infer_types(parse_program_text(program_text), question);
      auto values = execute_steps(tp, store);
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::cout << i + 1 << '\t' << name(tp.calls[i].primitive) << '\t' << to_string(values[i]) << '\n';
      }
      return kOk;
    }

    if (gi_cmd->parsed()) {
      std::vector<GenerationRequest> requests;
      PredicatePool pool;
      if (!question_file.empty()) {
        auto index = ingest_corpus(question_file, s.ingest());
        pool = predicate_pool(index);
        for (const auto& e : index.entries()) {
          requests.push_back({e.decomposition.question_text, e.decomposition.question_id,
                              e.decomposition.source_dataset, e.program});
        }
      } else {
        if (question.empty() || qdmr.empty()) throw Error("--question and --qdmr (or --question-file) are required");
        auto d = single_decomposition(qid, question, qdmr, in_level);
        requests.push_back({question, d.question_id, d.source_dataset,
                            infer_types(normalize(parse_decomposition(d, s.rule_table())), question)});
      }
      Output o(out);
      std::unique_ptr<Output> fo;
      if (keep_facts) {
        if (out.empty() || out == "-") throw Error("--keep-facts needs --out PATH");
        fo = std::make_unique<Output>(facts_path_for(out));
      }
      std::vector<int> ns;
      if (cardinality) ns.push_back(*cardinality);
      else ns.assign(s.gen.answer_cardinalities.begin(), s.gen.answer_cardinalities.end());
      int made = 0;
      for (std::size_t r = 0; r < requests.size(); ++r) {
        const auto& req = requests[r];
        for (int n : ns) {
          GenerationConfig gc = s.gen;
          gc.seed = derive_seed(s.seed, "instance", r * 8 + static_cast<std::uint64_t>(n));
          auto res = generate_instance(req, n, gc, pool, s.template_set());
          if (!res.ok()) {
            std::cerr << req.question_id << " N=" << n << ": no instance after " << res.failure.attempts
                      << " attempts;";
            for (const auto& [k, v] : res.failure.reasons) std::cerr << " " << k << "=" << v;
            std::cerr << '\n';
            continue;
          }
          ++made;
          o.line(to_json_line(res.generated->instance));
          if (fo) fo->line(facts_to_json_line(res.generated->instance.id, res.generated->facts));
        }
      }
      return made ? kOk : kValidation;
    }

    if (gd_cmd->parsed()) {
      IngestStats ist;
      auto index = ingest_corpus(corpus, s.ingest(), &ist);
      DatasetConfig dc;
      dc.target_size = size;
      dc.balanced = !no_balance;
      dc.entity_perturb_probability = entity_p;
      dc.dev_fraction = dev_fraction;
      dc.workers = s.workers;
      dc.seed = s.seed;
      dc.generation = s.gen;
      Output train_out(out), dev_out(with_suffix(out, ".dev"));
      std::unique_ptr<Output> train_facts, dev_facts;
      if (keep_facts) {
        train_facts = std::make_unique<Output>(facts_path_for(out));
        dev_facts = std::make_unique<Output>(facts_path_for(with_suffix(out, ".dev")));
      }
      auto st = generate_dataset(
          index, dc,
          [&](const GeneratedInstance& g) {
            bool is_dev = g.instance.split == "dev";
            (is_dev ? dev_out : train_out).line(to_json_line(g.instance));
            if (keep_facts) (is_dev ? *dev_facts : *train_facts).line(facts_to_json_line(g.instance.id, g.facts));
          },
          s.template_set());
      Output side(out + ".stats.json");
      side.line(st.to_json());
      std::cerr << st.accepted << " instances (" << st.train << " train, " << st.dev << " dev) from " << st.slots
                << " slots over " << st.pattern_counts.size() << " patterns; corpus admitted " << ist.admitted << "/"
                << ist.rows << '\n';
      return st.accepted == size ? kOk : kValidation;
    }

    if (gp_cmd->parsed()) {
      std::vector<PrimitiveId> ids;
      if (primitives.empty()) {
        for (const auto& sig : registry()) ids.push_back(sig.primitive);
      } else {
        for (const auto& p : primitives) {
          auto id = parse_primitive(p);
          if (!id) throw Error("unknown primitive '" + p + "'");
          ids.push_back(*id);
        }
      }
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create " + out_dir);
      // One file pair per primitive, so workers never share an output.
      std::vector<std::string> errors(ids.size());
      auto run = [&](std::size_t i) {
        try {
          std::string stem = out_dir + "/" + std::string(name(ids[i]));
          Output tr(stem + ".train.jsonl"), dv(stem + ".dev.jsonl");
          generate_primitive_instances(ids[i], train, dev, s.seed, [&](const QAInstance& inst) {
            (inst.split == "dev" ? dv : tr).line(to_json_line(inst));
          }, s.template_set());
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      };
      std::atomic<std::size_t> cursor{0};
      std::vector<std::thread> threads;
      for (int w = 0; w < s.workers; ++w) {
        threads.emplace_back([&] {
          for (std::size_t i = cursor++; i < ids.size(); i = cursor++) run(i);
        });
      }
      for (auto& t : threads) t.join();
      int failed = 0;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (errors[i].empty()) continue;
        ++failed;
        std::cerr << name(ids[i]) << ": " << errors[i] << '\n';
      }
      std::cerr << ids.size() - static_cast<std::size_t>(failed) << " primitives written to " << out_dir << '\n';
      return failed ? kValidation : kOk;
    }

    if (verify_cmd->parsed()) {
      JsonlReader reader(in_path), freader(facts);
      std::string line, fline;
      std::uint64_t total = 0, p1 = 0, p2 = 0, p3 = 0, answers = 0, budget = 0, steps = 0, card = 0, contrast = 0;
      while (reader.next(line)) {
        auto inst = instance_from_json(line);
        if (!freader.next(fline)) throw SchemaError("facts file has fewer records than " + in_path);
        auto [fid, store] = facts_from_json(fline);
        if (fid != inst.id) throw SchemaError("fact record " + fid + " does not match instance " + inst.id);
        ++total;
        auto r = check_instance(inst, store);
        p1 += r.p1.pass;
        p2 += r.p2.pass;
        p3 += r.p3.pass;
        answers += r.answers_match;
        budget += store.size() <= static_cast<std::size_t>(s.gen.max_facts);
        steps += inst.program.size() >= 2 && inst.program.size() <= 6;
        card += s.gen.answer_cardinalities.count(inst.cardinality) > 0 &&
                static_cast<int>(inst.answers.size()) == inst.cardinality;
        contrast += inst.distractor_answers != inst.answers;
        if (!r.pass()) {
          std::cout << inst.id << ":";
          for (const auto* p : {&r.p1, &r.p2, &r.p3}) {
            if (!p->pass) std::cout << " " << p->detail;
          }
          if (!r.answers_match) std::cout << " answer mismatch";
          std::cout << '\n';
        }
      }
      if (freader.next(fline)) throw SchemaError("facts file has more records than " + in_path);
      auto row = [&](const char* label, std::uint64_t n) {
        std::cout << label << " " << n << "/" << total << '\n';
        return n == total;
      };
      bool ok = row("P1", p1) & row("P2", p2) & row("P3", p3) & row("answers", answers) & row("fact_budget", budget) &
                row("step_range", steps) & row("cardinality", card) & row("gold_ne_distractor", contrast);
      return ok ? kOk : kValidation;
    }

    if (stats_cmd->parsed()) {
      auto r = run_stats(in_path);
      std::cout << (as_json ? r.to_json() + "\n" : r.to_text());
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}

#include "synthqa/jsonl.hpp"

#include <cstdlib>

#include "json.hpp"
#include "synthqa/errors.hpp"
#include "synthqa/qdmr_parser.hpp"
#include "synthqa/type_inference.hpp"

namespace synthqa {

using json = nlohmann::ordered_json;

bool PerturbationRecord::empty() const {
  for (const auto& s : steps) {
    if (s) return false;
  }
  return true;
}

TypedProgram PerturbationRecord::apply(const TypedProgram& gold) const {
  TypedProgram out = gold;
  for (std::size_t i = 0; i < steps.size() && i < out.calls.size(); ++i) {
    if (steps[i]) out.calls[i].predicate = steps[i]->perturbed;
  }
  return out;
}

std::string encode_value(const Value& v) { return scalar_key(v); }

std::optional<Value> decode_value(std::string_view text) {
  if (text.size() < 2 || text[1] != ':') return std::nullopt;
  auto body = std::string(text.substr(2));
  switch (text[0]) {
    case 'e':
      return Value::entity(body);
    case 'b':
      if (body == "1") return Value::boolean(true);
      if (body == "0") return Value::boolean(false);
      return std::nullopt;
    case 'n': {
      char* end = nullptr;
      double x = std::strtod(body.c_str(), &end);
      if (end == body.c_str() || *end != '\0') return std::nullopt;
      return Value::number(x);
    }
    case 'd': {
      Date d;
      if (std::sscanf(body.c_str(), "%d-%d-%d", &d.year, &d.month, &d.day) != 3) return std::nullopt;
      return Value::date(d);
    }
    default:
      return std::nullopt;
  }
}

namespace {

constexpr const char* kKnownFields[] = {"id",      "question", "context",     "answers", "program",
                                        "pattern", "num_facts", "cardinality", "meta"};
constexpr const char* kKnownMeta[] = {"question_id", "source_dataset", "seed",         "split",
                                      "steps",       "types",          "perturbation", "distractor_answers"};

template <std::size_t N>
bool known(const std::string& key, const char* const (&list)[N]) {
  for (const char* k : list) {
    if (key == k) return true;
  }
  return false;
}

json parse_object(std::string_view text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError(std::string(what) + ": not a JSON object");
  return j;
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string(what) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string(what) + ": bad field '" + key + "'");
  }
}

}  // namespace

std::string to_json_line(const QAInstance& inst) {
  json j;
  j["id"] = inst.id;
  j["question"] = inst.question;
  j["context"] = inst.context;
  j["answers"] = inst.answers;
  j["program"] = render_program(inst.program);
  j["pattern"] = inst.pattern;
  j["num_facts"] = inst.num_facts;
  j["cardinality"] = inst.cardinality;
  json meta;
  meta["question_id"] = inst.question_id;
  meta["source_dataset"] = inst.source_dataset;
  meta["seed"] = inst.seed;
  meta["split"] = inst.split;
  meta["steps"] = inst.program.size();
  json types = json::array();
  for (const auto& t : inst.program.types) types.push_back(to_string(t));
  meta["types"] = types;
  json pert = json::array();
  for (const auto& s : inst.perturbation.steps) {
    if (!s) {
      pert.push_back(nullptr);
      continue;
    }
    pert.push_back(json{{"original", s->original.text()},
                        {"perturbed", s->perturbed.text()},
                        {"mechanism", std::string(to_string(s->mechanism))}});
  }
  meta["perturbation"] = pert;
  meta["distractor_answers"] = inst.distractor_answers;
  json extra_meta = json::parse(inst.extra_meta), extra = json::parse(inst.extra_fields);
  for (auto& [k, v] : extra_meta.items()) meta[k] = v;
  j["meta"] = meta;
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j.dump();
}

QAInstance instance_from_json(std::string_view line) {
  const char* what = "instance record";
  json j = parse_object(line, what);
  QAInstance inst;
  inst.id = field<std::string>(j, "id", what);
  inst.question = field<std::string>(j, "question", what);
  inst.context = field<std::string>(j, "context", what);
  inst.answers = field<std::vector<std::string>>(j, "answers", what);
  inst.pattern = field<std::string>(j, "pattern", what);
  inst.num_facts = field<int>(j, "num_facts", what);
  inst.cardinality = field<int>(j, "cardinality", what);
  Program p;
  try {
    p = parse_program_text(field<std::string>(j, "program", what));
  } catch (const Error& e) {
    throw SchemaError(std::string(what) + ": bad program: " + e.what());
  }
  json meta = j.contains("meta") && j["meta"].is_object() ? j["meta"] : json::object();
  std::vector<ValueType> types;
  if (meta.contains("types") && meta["types"].is_array()) {
    for (const auto& t : meta["types"]) {
      auto vt = t.is_string() ? parse_value_type(t.get<std::string>()) : std::nullopt;
      if (!vt) throw SchemaError(std::string(what) + ": bad type in meta.types");
      types.push_back(*vt);
    }
  }
  if (types.size() == p.calls.size()) {
    inst.program = TypedProgram{p.calls, types};
  } else {
    inst.program = infer_types(p, inst.question);
  }
  inst.question_id = meta.value("question_id", std::string{});
  inst.source_dataset = meta.value("source_dataset", std::string{});
  inst.seed = meta.value("seed", std::uint64_t{0});
  inst.split = meta.value("split", std::string{"train"});
  if (meta.contains("perturbation") && meta["perturbation"].is_array()) {
    for (const auto& s : meta["perturbation"]) {
      if (s.is_null()) {
        inst.perturbation.steps.emplace_back();
        continue;
      }
      auto mech = parse_mechanism(field<std::string>(s, "mechanism", what));
      if (!mech) throw SchemaError(std::string(what) + ": bad perturbation mechanism");
      inst.perturbation.steps.emplace_back(PerturbedStep{Predicate(field<std::string>(s, "original", what)),
                                                         Predicate(field<std::string>(s, "perturbed", what)),
                                                         *mech});
    }
  }
  if (meta.contains("distractor_answers")) {
    inst.distractor_answers = field<std::vector<std::string>>(meta, "distractor_answers", what);
  }
  json extra = json::object(), extra_meta = json::object();
  for (auto& [k, v] : j.items()) {
    if (!known(k, kKnownFields)) extra[k] = v;
  }
  for (auto& [k, v] : meta.items()) {
    if (!known(k, kKnownMeta)) extra_meta[k] = v;
  }
  inst.extra_fields = extra.dump();
  inst.extra_meta = extra_meta.dump();
  return inst;
}

std::string facts_to_json_line(const std::string& id, const FactStore& store) {
  json facts = json::array();
  for (const auto& f : store.facts()) {
    json o;
    o["predicate"] = f.predicate.text();
    o["family"] = f.family;
    o["subject"] = encode_value(f.subject);
    if (f.object) o["object"] = encode_value(*f.object);
    o["chain"] = std::string(to_string(f.chain));
    facts.push_back(std::move(o));
  }
  json j;
  j["id"] = id;
  j["facts"] = facts;
  return j.dump();
}

std::pair<std::string, FactStore> facts_from_json(std::string_view line) {
  const char* what = "facts record";
  json j = parse_object(line, what);
  std::string id = field<std::string>(j, "id", what);
  FactStore store;
  auto arr = j.find("facts");
  if (arr == j.end() || !arr->is_array()) throw SchemaError(std::string(what) + ": missing field 'facts'");
  for (const auto& o : *arr) {
    Fact f;
    f.predicate = Predicate(field<std::string>(o, "predicate", what));
    f.family = field<std::string>(o, "family", what);
    auto subj = decode_value(field<std::string>(o, "subject", what));
    if (!subj) throw SchemaError(std::string(what) + ": bad subject");
    f.subject = *subj;
    if (o.contains("object")) {
      auto obj = decode_value(field<std::string>(o, "object", what));
      if (!obj) throw SchemaError(std::string(what) + ": bad object");
      f.object = *obj;
    }
    auto chain = parse_chain(field<std::string>(o, "chain", what));
    if (!chain) throw SchemaError(std::string(what) + ": bad chain");
    f.chain = *chain;
    store.add(std::move(f));
  }
  return {id, std::move(store)};
}

JsonlReader::JsonlReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path);
}

bool JsonlReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

}  // namespace synthqa

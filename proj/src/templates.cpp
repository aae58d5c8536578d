#include "synthqa/templates.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "synthqa/errors.hpp"

namespace synthqa {

namespace {
#include "synthqa_templates.inc"
}  // namespace

TemplateSet TemplateSet::from_text(std::string_view text) {
  TemplateSet t;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw SchemaError("template line " + std::to_string(line_no) + ": expected family<TAB>template");
    }
    std::string family(line.substr(0, tab));
    std::string body(line.substr(tab + 1));
    if (family.starts_with("q.")) {
      t.questions_[family.substr(2)].push_back(std::move(body));
    } else {
      t.sentences_[family] = std::move(body);
    }
    if (end == text.size()) break;
  }
  return t;
}

TemplateSet TemplateSet::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read template file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet t = from_text(kBuiltinTemplates);
  return t;
}

const std::string* TemplateSet::sentence(std::string_view family) const {
  auto it = sentences_.find(family);
  return it == sentences_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& TemplateSet::questions(std::string_view primitive) const {
  static const std::vector<std::string> kNone;
  auto it = questions_.find(primitive);
  return it == questions_.end() ? kNone : it->second;
}

std::vector<std::string> TemplateSet::families() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : sentences_) out.push_back(k);
  return out;
}

std::string fill(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = slots.find(tmpl.substr(i + 1, close - i - 1));
        if (it != slots.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string surface(const Value& v, bool grouped_numbers) {
  if (v.is_number()) return grouped_numbers ? format_number_grouped(v.as_number()) : format_number(v.as_number());
  return to_string(v);
}

std::string render_fact(const Fact& fact, const TemplateSet& templates, bool grouped_numbers) {
  const auto* tmpl = templates.sentence(fact.family);
  if (!tmpl) throw SchemaError("no sentence template for family '" + fact.family + "'");
  std::string entity = surface(fact.subject, grouped_numbers);
  std::string pred = fact.predicate.text();
  for (std::size_t pos; (pos = pred.find(kRefSlot)) != std::string::npos;) pred.replace(pos, kRefSlot.size(), entity);
  std::map<std::string, std::string, std::less<>> slots{{"entity", entity}, {"predicate", pred}};
  if (fact.object) slots["value"] = surface(*fact.object, grouped_numbers);
  std::string out = fill(*tmpl, slots);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string render_context(const FactStore& store, Rng& rng, const TemplateSet& templates, bool grouped_numbers) {
  std::vector<std::string> sentences;
  for (const auto& f : store.facts()) {
    if (f.family == kHiddenFamily) continue;
    sentences.push_back(render_fact(f, templates, grouped_numbers));
  }
  rng.shuffle(sentences);
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace synthqa

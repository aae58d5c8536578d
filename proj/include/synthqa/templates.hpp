#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "synthqa/fact_store.hpp"
#include "synthqa/rng.hpp"

namespace synthqa {

/// Family of facts that back the question itself; never rendered into the context.
inline constexpr std::string_view kHiddenFamily = "query";

/// Sentence and question templates ("family<TAB>template" lines).
class TemplateSet {
 public:
  static TemplateSet from_text(std::string_view text);
  static TemplateSet from_file(const std::string& path);
  static const TemplateSet& builtin();

  /// Fact sentence template for a family; nullptr when unknown.
  const std::string* sentence(std::string_view family) const;
  /// Question templates for a primitive name (may be empty).
  const std::vector<std::string>& questions(std::string_view primitive) const;
  std::vector<std::string> families() const;

 private:
  std::map<std::string, std::string, std::less<>> sentences_;
  std::map<std::string, std::vector<std::string>, std::less<>> questions_;
};

/// Replaces "{slot}" occurrences; unknown slots are left untouched.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots);

/// Value as written in a context; grouped_numbers adds thousand separators.
std::string surface(const Value& v, bool grouped_numbers = false);

/// One sentence for the fact. Throws SchemaError for an unknown family.
std::string render_fact(const Fact& fact, const TemplateSet& templates = TemplateSet::builtin(),
                        bool grouped_numbers = false);

/// Renders every visible fact, shuffles the sentences and joins them with spaces.
std::string render_context(const FactStore& store, Rng& rng, const TemplateSet& templates = TemplateSet::builtin(),
                           bool grouped_numbers = false);

}  // namespace synthqa

#include "synthqa/fact_store.hpp"

#include <cstdio>

namespace synthqa {

std::string_view to_string(Chain c) { return c == Chain::kGold ? "gold" : "distractor"; }

std::optional<Chain> parse_chain(std::string_view text) {
  if (text == "gold") return Chain::kGold;
  if (text == "distractor") return Chain::kDistractor;
  return std::nullopt;
}

std::string scalar_key(const Value& v) {
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "n:%.17g", v.as_number());
    return buf;
  }
  if (v.is_date()) {
    const auto& d = v.as_date();
    return "d:" + std::to_string(d.year) + "-" + std::to_string(d.month) + "-" + std::to_string(d.day);
  }
  if (v.is_entity()) return "e:" + v.as_entity();
  if (v.is_boolean()) return v.as_boolean() ? "b:1" : "b:0";
  return "c:" + to_string(v);
}

FactStore::AddResult FactStore::add(Fact fact) {
  auto& idx = index_[fact.predicate.text()];
  std::string key = scalar_key(fact.subject);
  if (fact.object) {
    if (auto it = idx.attributes.find(key); it != idx.attributes.end()) {
      return *facts_[it->second].object == *fact.object ? AddResult::kDuplicate : AddResult::kConflict;
    }
    idx.attributes.emplace(key, facts_.size());
  } else {
    if (!idx.members.insert(key).second) return AddResult::kDuplicate;
  }
  idx.facts.push_back(facts_.size());
  facts_.push_back(std::move(fact));
  return AddResult::kAdded;
}

bool FactStore::has_predicate(std::string_view predicate) const {
  auto it = index_.find(std::string(predicate));
  return it != index_.end() && !it->second.facts.empty();
}

bool FactStore::has_membership(std::string_view predicate, const Value& subject) const {
  auto it = index_.find(std::string(predicate));
  return it != index_.end() && it->second.members.count(scalar_key(subject)) > 0;
}

std::optional<Value> FactStore::attribute(std::string_view predicate, const Value& subject) const {
  auto it = index_.find(std::string(predicate));
  if (it == index_.end()) return std::nullopt;
  auto a = it->second.attributes.find(scalar_key(subject));
  if (a == it->second.attributes.end()) return std::nullopt;
  return facts_[a->second].object;
}

std::vector<Value> FactStore::members(std::string_view predicate) const {
  std::vector<Value> out;
  auto it = index_.find(std::string(predicate));
  if (it == index_.end()) return out;
  for (auto i : it->second.facts) {
    if (!facts_[i].object) out.push_back(facts_[i].subject);
  }
  return out;
}

Dict FactStore::attributes(std::string_view predicate) const {
  Dict out;
  auto it = index_.find(std::string(predicate));
  if (it == index_.end()) return out;
  for (auto i : it->second.facts) {
    if (facts_[i].object) out.push_back({facts_[i].subject, *facts_[i].object});
  }
  return out;
}

std::vector<Value> FactStore::subjects(std::string_view predicate) const {
  std::vector<Value> out;
  std::unordered_set<std::string> seen;
  auto it = index_.find(std::string(predicate));
  if (it == index_.end()) return out;
  for (auto i : it->second.facts) {
    if (seen.insert(scalar_key(facts_[i].subject)).second) out.push_back(facts_[i].subject);
  }
  return out;
}

}  // namespace synthqa

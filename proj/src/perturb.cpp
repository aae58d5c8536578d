#include "synthqa/perturb.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>

#include "synthqa/errors.hpp"

namespace synthqa {

std::string_view to_string(PerturbMechanism m) {
  return m == PerturbMechanism::kEntitySwap ? "entity_swap" : "retrieved_predicate";
}

std::optional<PerturbMechanism> parse_mechanism(std::string_view text) {
  if (text == "entity_swap") return PerturbMechanism::kEntitySwap;
  if (text == "retrieved_predicate") return PerturbMechanism::kRetrievedPredicate;
  return std::nullopt;
}

void PredicatePool::add(const Predicate& p, const ValueType& t, std::optional<PrimitiveId> primitive) {
  for (const auto& e : entries_) {
    if (e.predicate == p && e.type == t && e.primitive == primitive) return;
  }
  entries_.push_back({p, t, primitive});
}

namespace {

std::set<std::string> token_set(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '#') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

// Replacement names; single tokens so a swapped run stays one mention.
constexpr std::array<std::string_view, 48> kNames = {
    "Tom",     "Edward",  "Anna",    "Maria",   "James",   "Oliver",  "Sophia",  "Lucas",
    "Emma",    "Henry",   "Clara",   "Victor",  "Nadia",   "Omar",    "Priya",   "Kenji",
    "Elena",   "Marcus",  "Ingrid",  "Diego",   "Fatima",  "Hugo",    "Irene",   "Jonas",
    "Leila",   "Mateo",   "Nora",    "Pavel",   "Rosa",    "Samuel",  "Tara",    "Ulrich",
    "Berlin",  "Madrid",  "Chicago", "Denver",  "Boston",  "Lagos",   "Oslo",    "Lima",
    "Bears",   "Lions",   "Eagles",  "Falcons", "Giants",  "Ravens",  "Titans",  "Saints"};

std::string shifted_year_text(int year, Rng& rng) {
  int delta = rng.uniform_int(1, 5) * (rng.chance(0.5) ? 1 : -1);
  int y = year + delta;
  if (y < kMinYear || y > kMaxYear) y = year - delta;
  return std::to_string(std::clamp(y, kMinYear, kMaxYear));
}

}  // namespace

double word_overlap(std::string_view original, std::string_view candidate) {
  auto a = token_set(original);
  if (a.empty()) return 0.0;
  auto b = token_set(candidate);
  std::size_t shared = 0;
  for (const auto& t : a) shared += b.count(t);
  return static_cast<double>(shared) / static_cast<double>(a.size());
}

std::string swap_mention_text(std::string_view mention, MentionKind kind, Rng& rng) {
  switch (kind) {
    case MentionKind::kNumber: {
      auto parsed = parse_number(mention);
      double x = parsed.value_or(0.0);
      bool integral = std::floor(x) == x;
      double lo = std::max(kMinNumber, x * 0.8), hi = std::min(kMaxNumber, x * 1.2);
      for (int tries = 0; tries < 16; ++tries) {
        double y;
        if (integral) {
          long long a = static_cast<long long>(std::ceil(lo)), b = static_cast<long long>(std::floor(hi));
          if (b - a < 1) {
            y = x + (x >= kMaxNumber ? -1 : 1);
          } else {
            y = static_cast<double>(a + static_cast<long long>(rng.below(static_cast<std::uint64_t>(b - a + 1))));
          }
        } else {
          y = std::round((lo + (hi - lo) * rng.uniform01()) * 100.0) / 100.0;
        }
        if (y != x) return format_number(y);
      }
      return format_number(x + 1);
    }
    case MentionKind::kDate: {
      auto d = parse_date(mention);
      if (!d) return std::string(mention) + " 1";
      auto year = shifted_year_text(d->year, rng);
      if (!d->has_month_day()) return year;
      Date nd{std::stoi(year), d->month, d->day};
      if (nd.month == 2 && nd.day == 29) nd.day = 28;
      return format_date(nd);
    }
    case MentionKind::kOrdinal: {
      int n = ordinal_value(mention);
      if (n <= 0) n = 1;
      int m = n == 1 ? 2 : (rng.chance(0.5) ? n - 1 : n + 1);
      if (m > 10 && !std::isdigit(static_cast<unsigned char>(mention.front()))) m = n - 1;
      return ordinal_like(mention, m);
    }
    case MentionKind::kEntity: {
      for (;;) {
        auto name = kNames[rng.below(kNames.size())];
        if (name != mention) return std::string(name);
      }
    }
  }
  return std::string(mention);
}

std::string swap_one_mention(const Predicate& p, Rng& rng) {
  const auto& ms = p.mentions();
  if (ms.empty()) return p.text();
  const auto& m = ms[rng.below(ms.size())];
  auto original = m.in(p.text());
  std::string out = p.text();
  out.replace(m.begin, m.end - m.begin, swap_mention_text(original, m.kind, rng));
  return out;
}

PerturbedPredicate perturb_predicate(const Predicate& p, const ValueType& type, const PredicatePool& pool, Rng& rng,
                                     std::optional<PrimitiveId> primitive) {
  if (!p.mentions().empty()) return {Predicate(swap_one_mention(p, rng)), PerturbMechanism::kEntitySwap};
  bool has_ref = p.text().find(kRefSlot) != std::string::npos;
  struct Scored {
    double overlap;
    const Predicate* pred;
  };
  std::vector<Scored> cands;
  for (const auto& e : pool.entries()) {
    if (!(e.type == type) || e.predicate == p) continue;
    if (primitive && e.primitive && *e.primitive != *primitive) continue;
    if ((e.predicate.text().find(kRefSlot) != std::string::npos) != has_ref) continue;
    double o = word_overlap(p.text(), e.predicate.text());
    if (o > 0.75) continue;
    bool dup = false;
    for (const auto& c : cands) dup = dup || *c.pred == e.predicate;
    if (!dup) cands.push_back({o, &e.predicate});
  }
  if (cands.empty()) throw PoolExhausted("no type-consistent predicate for '" + p.text() + "'");
  std::stable_sort(cands.begin(), cands.end(), [](const Scored& a, const Scored& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.pred->text() < b.pred->text();
  });
  if (cands.size() > 30) cands.resize(30);
  return {*cands[rng.below(cands.size())].pred, PerturbMechanism::kRetrievedPredicate};
}

}  // namespace synthqa

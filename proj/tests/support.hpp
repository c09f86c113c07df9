#pragma once

#include <random>
#include <string>
#include <vector>

#include "cpi/knowledge_base.hpp"
#include "cpi/sentence.hpp"
#include "cpi/world_space.hpp"

namespace cpi::testing {

inline Rational q(const char* text) { return parse_rational(text); }
inline Sentence s(const char* text) { return parse_sentence(text); }
inline ProbabilityInterval iv(const char* lo, const char* hi) { return {parse_rational(lo), parse_rational(hi)}; }

inline CpiAxiom axiom(const char* consequent, const char* lo, const char* hi, const char* antecedent = "true") {
  return {s(consequent), s(antecedent), iv(lo, hi), 0};
}

// Direct probability of a sentence under a world distribution, by evaluation.
inline Rational prob(const Sentence& sentence, const WorldSpace& ws, const std::vector<Rational>& x) {
  Rational sum = 0;
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (evaluate(sentence, ws.world(i))) sum += x[i];
  return sum;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  // Random sentence over the given atoms with depth at most `depth`.
  Sentence sentence(const std::vector<std::string>& atoms, int depth) {
    if (depth == 0 || coin(0.35)) {
      Sentence a = Sentence::atom(atoms[below(atoms.size())]);
      return coin(0.25) ? !a : a;
    }
    switch (below(5)) {
      case 0: return !sentence(atoms, depth - 1);
      case 1: return sentence(atoms, depth - 1) && sentence(atoms, depth - 1);
      case 2: return sentence(atoms, depth - 1) || sentence(atoms, depth - 1);
      case 3: return Sentence::implies(sentence(atoms, depth - 1), sentence(atoms, depth - 1));
      default: return Sentence::iff(sentence(atoms, depth - 1), sentence(atoms, depth - 1));
    }
  }

  // Rational in [0,1] on a grid of 1/den.
  Rational grid(std::size_t den) {
    Rational r(static_cast<long>(below(den + 1)), static_cast<long>(den));
    r.canonicalize();
    return r;
  }

  ProbabilityInterval interval(std::size_t den = 10) {
    switch (below(4)) {
      case 0: { auto t = grid(den); return {t, t}; }
      case 1: return {grid(den), 1};
      case 2: return {0, grid(den)};
      default: {
        auto a = grid(den), b = grid(den);
        return {min(a, b), max(a, b)};
      }
    }
  }

  std::vector<std::string> atoms(std::size_t max_atoms) {
    static const char* names[] = {"A", "B", "C", "D", "E", "F"};
    std::vector<std::string> out;
    const std::size_t n = 1 + below(max_atoms);
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(names[i]);
    return out;
  }

  CpiAxiom axiom(const std::vector<std::string>& atoms, bool conditional) {
    Sentence ante = conditional && coin(0.4) ? sentence(atoms, 1) : Sentence::truth();
    return {sentence(atoms, 2), ante, interval(), 0};
  }

  // Random theory whose axioms are sampled around one hidden distribution, so
  // that most theories are feasible.
  KnowledgeBase consistent_theory(std::size_t max_atoms, std::size_t max_axioms, bool conditional = true,
                                  bool any_points = true) {
    return consistent_theory_over(atoms(max_atoms), {}, max_axioms, conditional, any_points);
  }

  // Same, over fixed atoms and background. The hidden distribution has masses in
  // multiples of 1/200, so it is itself a point of the 200-step grid.
  // With any_points off, point axioms are kept only when the hidden value is a tenth.
  KnowledgeBase consistent_theory_over(std::vector<std::string> names, std::vector<Sentence> background,
                                       std::size_t max_axioms, bool conditional = true,
                                       bool any_points = true) {
    KnowledgeBase kb;
    kb.atoms = std::move(names);
    kb.background = std::move(background);
    const WorldSpace ws = make_world_space(kb);
    std::vector<Rational> x(ws.size());
    long total = 0;
    while (total == 0 || 200 % total != 0) {
      total = 0;
      for (auto& v : x) {
        v = static_cast<long>(below(6));
        total += v.get_num().get_si();
      }
    }
    for (auto& v : x) v /= total;
    const std::size_t n = 1 + below(max_axioms);
    for (std::size_t i = 0; i < n; ++i) {
      CpiAxiom a = axiom(kb.atoms, conditional);
      const Rational pb = prob(a.antecedent, ws, x);
      if (pb > 0) {
        const Rational p = prob(a.consequent && a.antecedent, ws, x) / pb;
        // Widen around the hidden value on a 1/10 grid.
        Rational lo = 0, hi = 1;
        if (coin(0.8)) {
          lo = Rational(static_cast<long>(mpz_class(p * 10).get_si()), 10);
          lo.canonicalize();
          if (lo > p) lo -= Rational(1, 10);
          lo = max(Rational(0), lo - Rational(static_cast<long>(below(2)), 10));
        }
        if (coin(0.8)) {
          hi = Rational(static_cast<long>(mpz_class(p * 10).get_si()) + 1, 10);
          hi.canonicalize();
          if (hi - Rational(1, 10) == p) hi = p;
          hi = min(Rational(1), hi + Rational(static_cast<long>(below(2)), 10));
        }
        if (coin(0.2) && (any_points || 10 % p.get_den() == 0)) lo = hi = p;
        a.bounds = ProbabilityInterval(lo, hi);
      }
      kb.axioms.push_back(std::move(a));
    }
    return kb;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace cpi::testing

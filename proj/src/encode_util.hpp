#pragma once

#include <vector>

#include "paratrap/sat.hpp"

namespace paratrap::detail {

// Clause-building helpers over a growing Cnf. `top` is a literal fixed to
// true by a unit clause, so constants fold away.
class Encoder {
public:
  explicit Encoder(sat::Cnf &cnf) : cnf_(cnf) {
    top_ = cnf_.new_var();
    cnf_.add({top_});
  }

  sat::Cnf &cnf() { return cnf_; }
  int top() const { return top_; }
  int bottom() const { return -top_; }

  int fresh() { return cnf_.new_var(); }

  void at_most_one(const std::vector<int> &lits) {
    const std::size_t n = lits.size();
    if (n <= 5) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          cnf_.add({-lits[i], -lits[j]});
      return;
    }
    // sequential counter
    std::vector<int> s(n - 1);
    for (auto &v : s)
      v = fresh();
    cnf_.add({-lits[0], s[0]});
    for (std::size_t i = 1; i + 1 < n; ++i) {
      cnf_.add({-lits[i], s[i]});
      cnf_.add({-s[i - 1], s[i]});
      cnf_.add({-lits[i], -s[i - 1]});
    }
    cnf_.add({-lits[n - 1], -s[n - 2]});
  }

  void exactly_one(const std::vector<int> &lits) {
    cnf_.add(lits);
    at_most_one(lits);
  }

  int and2(int a, int b) {
    if (a == bottom() || b == bottom() || a == -b)
      return bottom();
    if (a == top())
      return b;
    if (b == top() || a == b)
      return a;
    const int r = fresh();
    cnf_.add({-r, a});
    cnf_.add({-r, b});
    cnf_.add({r, -a, -b});
    return r;
  }

  int or2(int a, int b) { return -and2(-a, -b); }

  int and_all(const std::vector<int> &lits) {
    std::vector<int> live;
    for (int l : lits) {
      if (l == bottom())
        return bottom();
      if (l != top())
        live.push_back(l);
    }
    if (live.empty())
      return top();
    if (live.size() == 1)
      return live[0];
    const int r = fresh();
    std::vector<int> back{r};
    for (int l : live) {
      cnf_.add({-r, l});
      back.push_back(-l);
    }
    cnf_.add(back);
    return r;
  }

  int or_all(const std::vector<int> &lits) {
    std::vector<int> neg;
    for (int l : lits)
      neg.push_back(-l);
    return -and_all(neg);
  }

  // Literal equivalent to "at least k of `lits` are true".
  int at_least(const std::vector<int> &lits, int k) {
    if (k <= 0)
      return top();
    if (static_cast<std::size_t>(k) > lits.size())
      return bottom();
    // prev[m] = at least m among the lits seen so far (m = 0..k)
    std::vector<int> prev(static_cast<std::size_t>(k) + 1, bottom());
    prev[0] = top();
    for (int b : lits) {
      std::vector<int> cur(prev.size());
      cur[0] = top();
      for (std::size_t m = 1; m < prev.size(); ++m)
        cur[m] = or2(prev[m], and2(prev[m - 1], b));
      prev = std::move(cur);
    }
    return prev[static_cast<std::size_t>(k)];
  }

private:
  sat::Cnf &cnf_;
  int top_;
};

} // namespace paratrap::detail

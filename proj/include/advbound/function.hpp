#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advbound/errors.hpp"
#include "advbound/matrix.hpp"

namespace advbound {

inline constexpr std::size_t kDefaultMaxS = 65536;
inline constexpr std::size_t kMaxCertificateArity = 20;

inline char letter_to_char(int letter) {
  return letter < 10 ? static_cast<char>('0' + letter)
                     : static_cast<char>('a' + letter - 10);
}

inline int char_to_letter(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  return -1;
}

// A partial function f: S -> H with S a list of words over {0..g-1}^n.
// The entry order fixes the canonical index used by every matrix.
class FunctionSpec {
 public:
  FunctionSpec(int n, int g, int h, std::vector<std::vector<int>> inputs,
               std::vector<int> outputs, std::string name = "")
      : n_(n),
        g_(g),
        h_(h),
        name_(std::move(name)),
        inputs_(std::move(inputs)),
        outputs_(std::move(outputs)) {
    validate();
  }

  int n() const { return n_; }
  int g() const { return g_; }
  int h() const { return h_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return inputs_.size(); }
  const std::vector<std::vector<int>>& inputs() const { return inputs_; }
  const std::vector<int>& outputs() const { return outputs_; }
  const std::vector<int>& input(std::size_t x) const { return inputs_[x]; }
  int output(std::size_t x) const { return outputs_[x]; }

  std::string word_string(std::size_t x) const {
    std::string s;
    s.reserve(static_cast<std::size_t>(n_));
    for (int letter : inputs_[x]) s.push_back(letter_to_char(letter));
    return s;
  }

  std::optional<std::size_t> index_of(const std::vector<int>& word) const {
    for (std::size_t x = 0; x < inputs_.size(); ++x)
      if (inputs_[x] == word) return x;
    return std::nullopt;
  }

  bool is_constant() const {
    for (std::size_t x = 1; x < outputs_.size(); ++x)
      if (outputs_[x] != outputs_[0]) return false;
    return true;
  }

  bool is_total() const {
    std::uint64_t full = 1;
    for (int i = 0; i < n_; ++i) {
      full *= static_cast<std::uint64_t>(g_);
      if (full > inputs_.size()) return false;
    }
    return full == inputs_.size();
  }

  void require_non_constant() const {
    if (is_constant())
      throw constant_function_error(
          "constant function has no adversary bound");
  }

 private:
  void validate() const {
    if (n_ < 1) throw input_error("n must be at least 1");
    if (g_ < 2 || g_ > 36) throw input_error("g must be in [2, 36]");
    if (h_ < 1 || h_ > 36) throw input_error("h must be in [1, 36]");
    if (inputs_.size() != outputs_.size())
      throw input_error("entries: input/output count mismatch");
    if (inputs_.empty()) throw input_error("entries: empty table");
    for (std::size_t e = 0; e < inputs_.size(); ++e) {
      if (inputs_[e].size() != static_cast<std::size_t>(n_))
        throw input_error("entry " + std::to_string(e) +
                          ": word length differs from n");
      for (int letter : inputs_[e])
        if (letter < 0 || letter >= g_)
          throw input_error("entry " + std::to_string(e) +
                            ": input letter out of range");
      if (outputs_[e] < 0 || outputs_[e] >= h_)
        throw input_error("entry " + std::to_string(e) +
                          ": output letter out of range");
    }
    for (std::size_t e = 0; e < inputs_.size(); ++e)
      for (std::size_t d = e + 1; d < inputs_.size(); ++d)
        if (inputs_[e] == inputs_[d])
          throw input_error("entry " + std::to_string(d) +
                            ": duplicate input word");
  }

  int n_, g_, h_;
  std::string name_;
  std::vector<std::vector<int>> inputs_;
  std::vector<int> outputs_;
};

struct DifferenceMatrices {
  std::vector<DenseMatrix> d;  // d[i][x,y] = 1 iff x_i != y_i
  DenseMatrix f_mat;           // f_mat[x,y] = 1 iff f(x) != f(y)
};

struct CertificateProfile {
  std::vector<std::vector<int>> certificates;  // per input, sorted positions
  std::vector<int> c;                          // per output letter
  std::vector<int> letter_order;               // c non-increasing, ties by letter
};

namespace detail {

// All n-bit words in lexicographic order, as int vectors.
inline std::vector<std::vector<int>> boolean_cube(int n) {
  std::vector<std::vector<int>> words;
  words.reserve(std::size_t{1} << n);
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
    std::vector<int> word(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      word[static_cast<std::size_t>(i)] =
          static_cast<int>((w >> (n - 1 - i)) & 1);
    words.push_back(std::move(word));
  }
  return words;
}

// Advances a k-combination of {0..n-1} to its lexicographic successor.
inline bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[static_cast<std::size_t>(i)] < n - k + i) {
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] =
            comb[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline FunctionSpec builtin(const std::string& name,
                            const std::vector<int>& params,
                            std::size_t max_s = kDefaultMaxS) {
  const auto need = [&](std::size_t count) {
    if (params.size() != count)
      throw input_error("builtin " + name + ": expected " +
                        std::to_string(count) + " parameter(s)");
    for (int p : params)
      if (p < 1) throw input_error("builtin " + name + ": sizes must be >= 1");
  };
  int n = 0;
  if (name == "or" || name == "and" || name == "parity") {
    need(1);
    n = params[0];
  } else if (name == "two_level_and_or") {
    need(2);
    n = params[0] * params[1];
  } else {
    throw input_error("unknown builtin: " + name);
  }
  if (n > 62 || (std::uint64_t{1} << n) > max_s)
    throw input_error("builtin " + name + ": table exceeds " +
                      std::to_string(max_s) + " rows");

  auto words = detail::boolean_cube(n);
  std::vector<int> outputs;
  outputs.reserve(words.size());
  std::string label = name;
  for (int p : params) label += "_" + std::to_string(p);
  for (const auto& w : words) {
    int f = 0;
    if (name == "or") {
      for (int b : w) f |= b;
    } else if (name == "and") {
      f = 1;
      for (int b : w) f &= b;
    } else if (name == "parity") {
      for (int b : w) f ^= b;
    } else {
      f = 1;
      for (int blk = 0; blk < params[0]; ++blk) {
        int any = 0;
        for (int j = 0; j < params[1]; ++j)
          any |= w[static_cast<std::size_t>(blk * params[1] + j)];
        f &= any;
      }
    }
    outputs.push_back(f);
  }
  return FunctionSpec(n, 2, 2, std::move(words), std::move(outputs), label);
}

inline DifferenceMatrices build_difference_matrices(const FunctionSpec& spec) {
  const std::size_t s = spec.size();
  const int n = spec.n();
  DifferenceMatrices dm;
  dm.d.assign(static_cast<std::size_t>(n), DenseMatrix(s, s));
  dm.f_mat = DenseMatrix(s, s);
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = x + 1; y < s; ++y) {
      for (int i = 0; i < n; ++i) {
        if (spec.input(x)[static_cast<std::size_t>(i)] !=
            spec.input(y)[static_cast<std::size_t>(i)]) {
          dm.d[static_cast<std::size_t>(i)](x, y) = 1.0;
          dm.d[static_cast<std::size_t>(i)](y, x) = 1.0;
        }
      }
      if (spec.output(x) != spec.output(y)) {
        dm.f_mat(x, y) = 1.0;
        dm.f_mat(y, x) = 1.0;
      }
    }
  }
  return dm;
}

// Minimal certificates (smallest size, then lexicographically smallest) for
// every input, plus the per-letter complexities C_h in sorted order.
inline CertificateProfile certificate_profile(const FunctionSpec& spec) {
  const int n = spec.n();
  if (n > static_cast<int>(kMaxCertificateArity))
    throw input_error("certificate search limited to n <= " +
                      std::to_string(kMaxCertificateArity));
  const std::size_t s = spec.size();

  CertificateProfile profile;
  profile.certificates.resize(s);
  profile.c.assign(static_cast<std::size_t>(spec.h()), 0);

  for (std::size_t x = 0; x < s; ++x) {
    // Positions in a certificate must hit the difference set of every input
    // with a different output.
    std::vector<std::uint32_t> diff_masks;
    for (std::size_t y = 0; y < s; ++y) {
      if (spec.output(y) == spec.output(x)) continue;
      std::uint32_t mask = 0;
      for (int i = 0; i < n; ++i)
        if (spec.input(x)[static_cast<std::size_t>(i)] !=
            spec.input(y)[static_cast<std::size_t>(i)])
          mask |= std::uint32_t{1} << i;
      diff_masks.push_back(mask);
    }

    bool found = diff_masks.empty();
    for (int k = 1; !found && k <= n; ++k) {
      std::vector<int> comb(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
      do {
        std::uint32_t imask = 0;
        for (int i : comb) imask |= std::uint32_t{1} << i;
        bool ok = true;
        for (std::uint32_t m : diff_masks)
          if ((m & imask) == 0) {
            ok = false;
            break;
          }
        if (ok) {
          profile.certificates[x] = comb;
          found = true;
          break;
        }
      } while (detail::next_combination(comb, n));
    }

    const std::size_t letter = static_cast<std::size_t>(spec.output(x));
    profile.c[letter] = std::max(
        profile.c[letter], static_cast<int>(profile.certificates[x].size()));
  }

  profile.letter_order.resize(static_cast<std::size_t>(spec.h()));
  for (int l = 0; l < spec.h(); ++l)
    profile.letter_order[static_cast<std::size_t>(l)] = l;
  std::stable_sort(profile.letter_order.begin(), profile.letter_order.end(),
                   [&](int a, int b) {
                     const int ca = profile.c[static_cast<std::size_t>(a)];
                     const int cb = profile.c[static_cast<std::size_t>(b)];
                     return ca != cb ? ca > cb : a < b;
                   });
  return profile;
}

}  // namespace advbound

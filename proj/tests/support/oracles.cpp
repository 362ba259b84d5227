#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace oracle {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    // prime = 2^40 + 2^8 + 0xb3
    h = (h << 40) + (h << 8) + h * 0xb3ULL;
  }
  return h;
}

double mock_probability(std::string_view prompt, std::string_view surface, std::uint64_t seed) {
  std::string message = std::to_string(seed);
  message.push_back(static_cast<char>(0x1F));
  message.append(prompt);
  message.push_back(static_cast<char>(0x1F));
  message.append(surface);
  const std::uint64_t low = fnv1a64(message) & ((std::uint64_t{1} << 53) - 1);
  const double u = low == 0 ? std::ldexp(1.0, -53) : std::ldexp(static_cast<double>(low), -53);
  return u * 0.125;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.empty() ? 0 : a[0].size(), std::vector<long double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), std::vector<long double>(b[0].size(), 0.0L));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Matrix inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0L) throw std::runtime_error("singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const long double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

std::vector<long double> normal_equations(const Matrix& X, const std::vector<long double>& y) {
  const auto Xt = transpose(X);
  const auto B = inverse(multiply(Xt, X));
  Matrix ym(y.size(), std::vector<long double>(1));
  for (std::size_t i = 0; i < y.size(); ++i) ym[i][0] = y[i];
  const auto beta = multiply(B, multiply(Xt, ym));
  std::vector<long double> out;
  for (const auto& r : beta) out.push_back(r[0]);
  return out;
}

namespace {

std::vector<long double> sandwich(const Matrix& X, const Matrix& meat) {
  const auto B = inverse(multiply(transpose(X), X));
  const auto V = multiply(multiply(B, meat), B);
  std::vector<long double> se;
  for (std::size_t j = 0; j < V.size(); ++j) se.push_back(std::sqrt(std::max(V[j][j], 0.0L)));
  return se;
}

}  // namespace

std::vector<long double> hc0(const Matrix& X, const std::vector<long double>& e) {
  const std::size_t k = X[0].size();
  Matrix meat(k, std::vector<long double>(k, 0.0L));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) meat[a][b] += e[i] * e[i] * X[i][a] * X[i][b];
  return sandwich(X, meat);
}

std::vector<long double> clustered(const Matrix& X, const std::vector<long double>& e,
                                   const std::vector<std::string>& ids) {
  const std::size_t k = X[0].size();
  std::map<std::string, std::vector<long double>> scores;
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto& s = scores.try_emplace(ids[i], k, 0.0L).first->second;
    for (std::size_t a = 0; a < k; ++a) s[a] += e[i] * X[i][a];
  }
  Matrix meat(k, std::vector<long double>(k, 0.0L));
  for (const auto& [id, s] : scores)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) meat[a][b] += s[a] * s[b];
  return sandwich(X, meat);
}

std::optional<double> count_polarity(const std::vector<std::string>& terms, const std::vector<std::string>& positive,
                                     const std::vector<std::string>& negative) {
  long long np = 0, nn = 0;
  for (const auto& t : terms) {
    if (std::find(positive.begin(), positive.end(), t) != positive.end()) ++np;
    if (std::find(negative.begin(), negative.end(), t) != negative.end()) ++nn;
  }
  if (np + nn == 0) return std::nullopt;
  return static_cast<double>(np - nn) / static_cast<double>(np + nn);
}

}  // namespace oracle

#pragma once

// Reference implementations used only by tests. They avoid the library's
// code paths: hashing uses shift-and-add multiplication, linear algebra runs
// in long double with Gauss-Jordan elimination.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long double>>;

std::uint64_t fnv1a64(std::string_view bytes);

// Next-token probability of the mock backend, recomputed from its digest
// definition.
double mock_probability(std::string_view prompt, std::string_view surface, std::uint64_t seed);

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix inverse(Matrix a);

// beta = (X'X)^-1 X'y.
std::vector<long double> normal_equations(const Matrix& X, const std::vector<long double>& y);

// sqrt(diag(B M B)) with B = (X'X)^-1 and M = sum_i e_i^2 x_i x_i'.
std::vector<long double> hc0(const Matrix& X, const std::vector<long double>& e);

// Same bread with M = sum_g (sum_{i in g} e_i x_i)(...)'.
std::vector<long double> clustered(const Matrix& X, const std::vector<long double>& e,
                                   const std::vector<std::string>& ids);

// (N+ - N-) / (N+ + N-) for a +-1 lexicon given as positive and negative sets.
std::optional<double> count_polarity(const std::vector<std::string>& terms, const std::vector<std::string>& positive,
                                     const std::vector<std::string>& negative);

}  // namespace oracle

#include "segsamp/rng.hpp"

#include <omp.h>

#include "segsamp/errors.hpp"
#include "segsamp/parallel.hpp"

namespace segsamp {

const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRangeCoordinate: return "OutOfRangeCoordinate";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::DegenerateEdge: return "DegenerateEdge";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::InconsistentConstraints: return "InconsistentConstraints";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::BadPermutation: return "BadPermutation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::BadData: return "BadData";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream, Purpose purpose,
                       std::uint64_t substream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  const auto p = static_cast<std::uint64_t>(purpose);
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream),
                    lo(p),    lo(substream), hi(substream)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream, Purpose purpose, std::uint64_t substream)
    : engine_(seeded(seed, stream, purpose, substream)) {}

std::size_t Rng::below(std::size_t n) {
  // rejection keeps the draw exactly uniform
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

void Rng::permutation(std::vector<int>& out, int n) {
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(below(static_cast<std::size_t>(i) + 1));
    std::swap(out[i], out[j]);
  }
}

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace segsamp

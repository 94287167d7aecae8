#include "snperm/sortnet.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace snperm::sortnet {

namespace {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// Greedy earliest-fit stages, then a stable reorder by stage. Comparators
// sharing a wire always land in distinct stages, so the reorder is a valid
// topological rearrangement and does not change the computed function.
void assign_stages(ComparatorNetwork& net) {
  std::vector<int> avail(net.n, 0);
  for (auto& c : net.comparators) {
    const int s = std::max(avail[c.top], avail[c.bottom]);
    c.stage = s;
    avail[c.top] = s + 1;
    avail[c.bottom] = s + 1;
  }
  std::stable_sort(net.comparators.begin(), net.comparators.end(),
                   [](const Comparator& a, const Comparator& b) { return a.stage < b.stage; });
}

}  // namespace

ComparatorNetwork bitonic_network(int n) {
  if (n < 1) throw std::invalid_argument("bitonic_network: n must be >= 1");
  ComparatorNetwork net;
  net.n = n;
  net.kind = NetworkKind::bitonic;
  const int N = next_pow2(n);
  // Merge sorted runs of length size/2 into runs of length size. The first
  // sub-stage compares mirrored pairs within each block, which folds the
  // second (ascending) half onto the first; the remaining sub-stages are
  // half-cleaners at decreasing strides. All comparators point the same way.
  for (int size = 2; size <= N; size *= 2) {
    for (int block = 0; block < N; block += size) {
      for (int i = 0; i < size / 2; ++i) {
        const int lo = block + i;
        const int hi = block + size - 1 - i;
        if (hi < n) net.comparators.push_back({lo, hi, 0});
      }
    }
    for (int stride = size / 4; stride >= 1; stride /= 2) {
      for (int i = 0; i < N; ++i) {
        if ((i & stride) == 0 && (i % (2 * stride)) < stride) {
          const int lo = i;
          const int hi = i + stride;
          if (hi < n) net.comparators.push_back({lo, hi, 0});
        }
      }
    }
  }
  assign_stages(net);
  return net;
}

ComparatorNetwork odd_even_network(int n) {
  if (n < 1) throw std::invalid_argument("odd_even_network: n must be >= 1");
  ComparatorNetwork net;
  net.n = n;
  net.kind = NetworkKind::odd_even;
  const int N = next_pow2(n);
  for (int p = 1; p < N; p *= 2) {
    for (int k = p; k >= 1; k /= 2) {
      for (int j = k % p; j + k < N; j += 2 * k) {
        for (int i = 0; i < k; ++i) {
          const int lo = i + j;
          const int hi = i + j + k;
          if (hi >= N) break;
          if (lo / (2 * p) == hi / (2 * p) && hi < n) {
            net.comparators.push_back({lo, hi, 0});
          }
        }
      }
    }
  }
  assign_stages(net);
  return net;
}

std::vector<double> apply(const ComparatorNetwork& net, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != net.n)
    throw std::invalid_argument("apply: input length does not match wire count");
  std::vector<double> y = x;
  for (const auto& c : net.comparators) {
    const double a = y[c.top];
    const double b = y[c.bottom];
    y[c.top] = std::min(a, b);
    y[c.bottom] = std::max(a, b);
  }
  return y;
}

bool verify_sorts(const ComparatorNetwork& net) {
  if (net.n > 20) throw std::invalid_argument("verify_sorts: n too large for exhaustive 0-1 check");
  const uint32_t total = 1u << net.n;
  for (uint32_t mask = 0; mask < total; ++mask) {
    // Wire i holds bit i; a comparator maps (a,b) to (a&b, a|b).
    uint32_t bits = mask;
    for (const auto& c : net.comparators) {
      const uint32_t a = (bits >> c.top) & 1u;
      const uint32_t b = (bits >> c.bottom) & 1u;
      const uint32_t mn = a & b;
      const uint32_t mx = a | b;
      bits &= ~((1u << c.top) | (1u << c.bottom));
      bits |= (mn << c.top) | (mx << c.bottom);
    }
    // Sorted ascending means all zeros precede all ones.
    bool seen_one = false;
    for (int i = 0; i < net.n; ++i) {
      const bool bit = (bits >> i) & 1u;
      if (bit) seen_one = true;
      else if (seen_one) return false;
    }
  }
  return true;
}

std::string to_text(const ComparatorNetwork& net) {
  std::ostringstream os;
  os << net.n << ' ' << net.num_comparators() << '\n';
  for (const auto& c : net.comparators) os << c.stage << ' ' << c.top << ' ' << c.bottom << '\n';
  return os.str();
}

}  // namespace snperm::sortnet

#pragma once

#include <string>
#include <vector>

namespace snperm::sortnet {

enum class NetworkKind { bitonic, odd_even, custom };

struct Comparator {
  int top = 0;     // wire that receives the min
  int bottom = 0;  // wire that receives the max
  int stage = 0;   // earliest-fit parallel stage, metadata only
};

struct ComparatorNetwork {
  int n = 0;
  std::vector<Comparator> comparators;
  NetworkKind kind = NetworkKind::custom;

  int num_comparators() const { return static_cast<int>(comparators.size()); }
};

// Batcher's bitonic sorter in the uniform-direction form (every comparator
// sends the min to the lower wire). Non-powers-of-two are handled by
// building the next power of two and dropping comparators that touch the
// virtual wires, which hold +inf sentinels and never exchange.
ComparatorNetwork bitonic_network(int n);

// Batcher's odd-even mergesort, pruned the same way for general n.
ComparatorNetwork odd_even_network(int n);

// Runs the network: each comparator replaces (a,b) by (min,max).
std::vector<double> apply(const ComparatorNetwork& net, const std::vector<double>& x);

// Exhaustive 0-1 principle check; requires n <= 20.
bool verify_sorts(const ComparatorNetwork& net);

// "n m" header then one "stage top bottom" line per comparator.
std::string to_text(const ComparatorNetwork& net);

}  // namespace snperm::sortnet

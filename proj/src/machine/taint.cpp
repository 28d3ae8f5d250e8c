#include "edap/machine/taint.hpp"

#include <array>

namespace edap::machine {

namespace {

bool informative(const std::uint8_t* p) {
  std::array<bool, 256> seen{};
  int distinct = 0;
  for (std::size_t i = 0; i < SecretScanner::kWindow; ++i) {
    if (!seen[p[i]]) {
      seen[p[i]] = true;
      ++distinct;
    }
  }
  return distinct >= 4;
}

std::string_view window(const std::uint8_t* p) {
  return {reinterpret_cast<const char*>(p), SecretScanner::kWindow};
}

}  // namespace

void SecretScanner::add(ByteView secret) {
  if (secret.size() < kWindow) return;
  store_.emplace_back(secret.begin(), secret.end());
  const Bytes& s = store_.back();
  for (std::size_t i = 0; i + kWindow <= s.size(); ++i) {
    if (informative(s.data() + i)) grams_.insert(window(s.data() + i));
  }
}

std::vector<std::size_t> SecretScanner::scan(ByteView hay) const {
  std::vector<std::size_t> hits;
  if (grams_.empty()) return hits;
  for (std::size_t i = 0; i + kWindow <= hay.size(); ++i) {
    if (grams_.contains(window(hay.data() + i))) hits.push_back(i);
  }
  return hits;
}

}  // namespace edap::machine

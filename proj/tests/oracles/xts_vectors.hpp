#pragma once

// IEEE 1619 XTS-AES-128 vectors 1, 2 and 3 (32-byte data units, tweak is
// the little-endian data unit sequence number).

#include <cstdint>

namespace oracle {

struct XtsVector {
  const char* k1;
  const char* k2;
  std::uint64_t seq;
  const char* pt;
  const char* ct;
};

inline constexpr XtsVector kXtsVectors[] = {
    {"00000000000000000000000000000000", "00000000000000000000000000000000", 0,
     "0000000000000000000000000000000000000000000000000000000000000000",
     "917cf69ebd68b2ec9b9fe9a3eadda692cd43d2f59598ed858c02c2652fbf922e"},
    {"11111111111111111111111111111111", "22222222222222222222222222222222", 0x3333333333,
     "4444444444444444444444444444444444444444444444444444444444444444",
     "c454185e6a16936e39334038acef838bfb186fff7480adc4289382ecd6d394f0"},
    {"fffefdfcfbfaf9f8f7f6f5f4f3f2f1f0", "22222222222222222222222222222222", 0x3333333333,
     "4444444444444444444444444444444444444444444444444444444444444444",
     "af85336b597afc1a900b2eb21ec949d292df4c047e0b21532186a5971a227a89"},
};

// GCM test case 2: H and C1, with the product C1 * H.
inline constexpr const char* kGhashH = "66e94bd4ef8a2c3b884cfa59ca342b2e";
inline constexpr const char* kGhashC1 = "0388dace60b6a392f328c2b971b2fe78";
inline constexpr const char* kGhashC1H = "5e2ec746917062882c85b0685353deb7";

}  // namespace oracle

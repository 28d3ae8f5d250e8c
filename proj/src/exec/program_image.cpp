#include "edap/exec/program_image.hpp"

#include <algorithm>
#include <string>

#include "edap/common/errors.hpp"

namespace edap::exec {

void ProgramImage::validate() const {
  if (sections.empty()) throw ImageError("image has no sections");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
  for (const auto& s : sections) {
    if (s.ea % crypto::kLineBytes != 0) {
      throw AlignmentError("section at " + std::to_string(s.ea) + " is not line aligned");
    }
    if (s.bytes.empty() || s.bytes.size() % crypto::kLineBytes != 0) {
      throw AlignmentError("section at " + std::to_string(s.ea) +
                           " is not a whole number of lines");
    }
    spans.emplace_back(s.ea, s.ea + s.bytes.size());
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) throw ImageError("sections overlap");
  }
  bool entry_ok = std::any_of(spans.begin(), spans.end(), [&](const auto& sp) {
    return entry_point >= sp.first && entry_point < sp.second;
  });
  if (!entry_ok) throw ImageError("entry point lies outside every section");
}

std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> ProgramImage::lines() const {
  validate();
  std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> out;
  for (const auto& s : sections) {
    for (std::size_t off = 0; off < s.bytes.size(); off += crypto::kLineBytes) {
      crypto::PlainBlock p;
      std::copy_n(s.bytes.begin() + static_cast<std::ptrdiff_t>(off), crypto::kLineBytes,
                  p.bytes.begin());
      out.emplace_back(s.ea + off, p);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

ProgramImage ProgramImage::from_flat(ByteView data, std::uint64_t base, std::uint64_t entry,
                                     ThreadId thread) {
  ProgramImage img;
  Section s;
  s.ea = base;
  s.bytes.assign(data.begin(), data.end());
  std::size_t padded = (s.bytes.size() + crypto::kLineBytes - 1) / crypto::kLineBytes *
                       crypto::kLineBytes;
  if (padded == 0) padded = crypto::kLineBytes;
  s.bytes.resize(padded, 0);
  img.sections.push_back(std::move(s));
  img.entry_point = entry;
  img.thread_id = thread;
  return img;
}

}  // namespace edap::exec

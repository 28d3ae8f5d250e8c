#include "edap/exec/memory_image.hpp"

#include <string>

#include "edap/common/errors.hpp"

namespace edap::exec {

namespace {

std::string hex_addr(std::uint64_t a) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(a));
  return buf;
}

}  // namespace

std::uint64_t MemoryImage::translate(std::uint64_t ea) const {
  auto it = translation_.find(ea);
  return it == translation_.end() ? ea : it->second;
}

void MemoryImage::remap(std::uint64_t ea, std::uint64_t real) {
  // Untouched eas map to themselves, so `real` is taken by itself unless it
  // has been remapped away.
  bool taken = real != ea && !translation_.contains(real);
  for (const auto& [e, r] : translation_) taken = taken || (e != ea && r == real);
  if (taken) throw IntegrityError("translation would not be injective");
  if (real == ea) {
    translation_.erase(ea);
  } else {
    translation_[ea] = real;
  }
}

void MemoryImage::swap(std::uint64_t ea_a, std::uint64_t ea_b) {
  const std::uint64_t ra = translate(ea_a);
  const std::uint64_t rb = translate(ea_b);
  translation_[ea_a] = rb;
  translation_[ea_b] = ra;
}

void MemoryImage::install(std::uint64_t real, const MemoryLine& line) {
  if (!lines_.emplace(real, line).second) {
    throw IntegrityError("real address " + hex_addr(real) + " already initialized");
  }
}

void MemoryImage::update(std::uint64_t real, const MemoryLine& line) {
  auto it = lines_.find(real);
  if (it == lines_.end()) throw UnmappedBlock("no line at real address " + hex_addr(real));
  it->second = line;
}

const MemoryLine& MemoryImage::at(std::uint64_t real) const {
  auto it = lines_.find(real);
  if (it == lines_.end()) throw UnmappedBlock("no line at real address " + hex_addr(real));
  return it->second;
}

MemoryLine& MemoryImage::raw(std::uint64_t real) {
  auto it = lines_.find(real);
  if (it == lines_.end()) throw UnmappedBlock("no line at real address " + hex_addr(real));
  return it->second;
}

}  // namespace edap::exec

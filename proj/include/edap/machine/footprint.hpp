#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace edap::machine {

/// Where the encryption engine sits. `baseline` has no engine at all and is
/// only meaningful to the timing model.
enum class Placement : std::uint8_t {
  baseline,
  fu_enclave,
  fu_enclave_buffered,
  cleartext_regfile,
  cleartext_l1,
};

inline constexpr std::array<Placement, 5> kAllPlacements = {
    Placement::baseline, Placement::cleartext_l1, Placement::cleartext_regfile,
    Placement::fu_enclave_buffered, Placement::fu_enclave};

inline constexpr std::array<Placement, 4> kEdapPlacements = {
    Placement::fu_enclave, Placement::fu_enclave_buffered, Placement::cleartext_regfile,
    Placement::cleartext_l1};

std::string_view to_string(Placement p) noexcept;
/// Case-insensitive; accepts the upper-case names and lower-case aliases.
std::optional<Placement> parse_placement(std::string_view s) noexcept;

struct FootprintConfig {
  Placement placement = Placement::cleartext_l1;
  /// Entries per functional-unit buffer (buffered placement only).
  std::size_t buffer_entries = 8;

  /// std::invalid_argument for baseline or a zero-entry buffer.
  void validate() const;

  bool registers_clear() const noexcept {
    return placement == Placement::cleartext_regfile || placement == Placement::cleartext_l1;
  }
  bool l1_clear() const noexcept { return placement == Placement::cleartext_l1; }
  bool buffered() const noexcept { return placement == Placement::fu_enclave_buffered; }
};

}  // namespace edap::machine

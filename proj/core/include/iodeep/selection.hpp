#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "iodeep/iod/iodeep.hpp"
#include "iodeep/iod/slice.hpp"

namespace iodeep::selection {

struct SelectionResult {
  /// DnnUID of the first candidate whose control counter reached 3.
  std::optional<std::string> matched_uid;
  /// Candidates inspected, including the matching one.
  std::size_t examined = 0;
  /// The third attribute was compared against StudyDescription.
  bool matched_on_description = false;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

/// Network selection over candidates in list order.
///
/// Modality and SamplesPerPixel must be equal. The third attribute is the
/// slice's BodyPartExamined when present (equality), otherwise its
/// StudyDescription, which must contain the candidate's BodyPartExamined
/// ignoring case and runs of whitespace. A slice carrying neither never
/// matches; neither does a candidate with an empty body part on the
/// description path.
SelectionResult select_network(const iod::SliceTagSet& slice,
                               std::span<const iod::IODeepDescriptor> candidates);

/// Lowercased, trimmed, internal whitespace runs collapsed to one space.
std::string normalize_for_search(std::string_view text);

/// Case-insensitive containment of `needle` in `haystack` after
/// normalization. Empty needles never match.
bool description_contains(std::string_view haystack, std::string_view needle);

}  // namespace iodeep::selection

#include "iodeep/selection.hpp"

#include <cctype>

namespace iodeep::selection {

std::string normalize_for_search(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

bool description_contains(std::string_view haystack, std::string_view needle) {
  const auto n = normalize_for_search(needle);
  if (n.empty()) return false;
  return normalize_for_search(haystack).find(n) != std::string::npos;
}

SelectionResult select_network(const iod::SliceTagSet& slice,
                               std::span<const iod::IODeepDescriptor> candidates) {
  SelectionResult result;
  const bool has_body_part = slice.body_part_examined && !slice.body_part_examined->empty();
  const bool has_description = slice.study_description && !slice.study_description->empty();
  if (!has_body_part && !has_description) {
    result.examined = 0;
    return result;
  }

  for (const auto& net : candidates) {
    ++result.examined;
    int control = 0;
    if (slice.modality == net.modality) ++control;
    if (slice.samples_per_pixel == net.samples_per_pixel) ++control;
    // Last attribute: equality on the body part, pattern search on the
    // study description.
    if (has_body_part) {
      if (*slice.body_part_examined == net.body_part_examined) ++control;
    } else if (description_contains(*slice.study_description, net.body_part_examined)) {
      ++control;
    }
    if (control == 3) {
      result.matched_uid = net.dnn_uid;
      result.matched_on_description = !has_body_part;
      return result;
    }
  }
  return result;
}

}  // namespace iodeep::selection

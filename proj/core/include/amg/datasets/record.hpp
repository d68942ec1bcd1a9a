#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amg/diffusion/process.hpp"
#include "amg/numerics/tensor.hpp"

namespace amg {

using RecordId = std::uint64_t;

/// One training clip with its caption.
struct Record {
  RecordId id = 0;
  Tensor clip;
  CaptionId caption = 0;
  std::string caption_text;
  std::optional<RecordId> duplicate_of;

  friend bool operator==(const Record&, const Record&) = default;
};

using Corpus = std::vector<Record>;

}  // namespace amg

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/frame.hpp"

namespace wavelut {

std::string_view to_string(PriorKind kind) noexcept {
    switch (kind) {
        case PriorKind::intensity:
            return "intensity";
        case PriorKind::lighting:
            return "lighting";
        case PriorKind::fused:
            return "fused";
    }
    return "unknown";
}

}  // namespace wavelut

#pragma once

namespace bpve {
inline constexpr const char* kVersion = "0.1.0";
}

#include "aerocf/random.hpp"

namespace aerocf {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t root, std::initializer_list<std::uint64_t> key) noexcept {
    std::uint64_t h = mix64(root);
    for (std::uint64_t part : key) h = mix64(h ^ mix64(part + 0x632be59bd9b4e019ULL));
    return h;
}

}  // namespace aerocf

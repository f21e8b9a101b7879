#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

// Forward declaration of the vendored nlohmann::json (3.11.3) so headers can
// mention the type without pulling in the full 24k-line header. The inline
// ABI namespace must match the vendored build exactly (no diagnostic or
// legacy-comparison tags), or the two declarations name different templates.
namespace nlohmann {
inline namespace json_abi_v3_11_3 {

template <typename T, typename SFINAE>
struct adl_serializer;

template <template <typename U, typename V, typename... Args> class ObjectType,
          template <typename U, typename... Args> class ArrayType, class StringType,
          class BooleanType, class NumberIntegerType, class NumberUnsignedType,
          class NumberFloatType, template <typename U> class AllocatorType,
          template <typename T, typename SFINAE> class JSONSerializer, class BinaryType,
          class CustomBaseClass>
class basic_json;

template <typename RefStringType>
class json_pointer;

using json = basic_json<std::map, std::vector, std::string, bool, std::int64_t,
                        std::uint64_t, double, std::allocator, adl_serializer,
                        std::vector<std::uint8_t>, void>;

}  // namespace json_abi_v3_11_3
}  // namespace nlohmann

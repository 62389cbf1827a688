#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexdiv {

struct Error : std::runtime_error {
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(kind)) {}
    std::string kind;
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain", msg) {}
};

struct DecodeError : Error {
    DecodeError(const std::string& msg, std::size_t offset)
        : Error("decode", msg + " at byte offset " + std::to_string(offset)),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

struct CapacityError : Error {
    explicit CapacityError(const std::string& msg) : Error("capacity", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error("format", msg) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error("numeric", msg) {}
};

}  // namespace lexdiv

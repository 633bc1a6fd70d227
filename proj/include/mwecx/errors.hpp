#ifndef MWECX_ERRORS_HPP
#define MWECX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mwecx {

// Base for all data/validation failures raised while loading or checking
// corpus files. Carries enough context (file, line, id) to point at the
// offending row.
class DataError : public std::runtime_error {
public:
    explicit DataError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

class MalformedRow : public DataError {
public:
    MalformedRow(const std::string& path, std::size_t line, const std::string& reason)
        : DataError(path + ":" + std::to_string(line) + ": " + reason),
          line_number(line) {}
    std::size_t line_number;
};

class SpanMismatch : public DataError {
public:
    explicit SpanMismatch(const std::string& id)
        : DataError("span does not match phrase for instance '" + id + "'"), instance_id(id) {}
    std::string instance_id;
};

class UnknownMweType : public DataError {
public:
    UnknownMweType(const std::string& id, const std::string& raw)
        : DataError("unknown MWE type '" + raw + "' for instance '" + id + "'"),
          instance_id(id), raw_value(raw) {}
    std::string instance_id;
    std::string raw_value;
};

class MissingLabel : public DataError {
public:
    explicit MissingLabel(const std::string& id)
        : DataError("no MWE label for instance '" + id + "'"), instance_id(id) {}
    std::string instance_id;
};

// Numeric / algorithmic contract violations.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(std::string msg) : std::invalid_argument(std::move(msg)) {}
};

}  // namespace mwecx

#endif

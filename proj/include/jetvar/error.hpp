#pragma once

#include <stdexcept>
#include <string>

namespace jetvar {

enum class ErrorKind {
    UnknownSymbol,
    UnboundSymbol,
    Domain,
    UnsupportedOrder,
    OrderOverflow,
    AlreadyComposite,
    JetDependence,
    SingularJacobian,
    SingularMetric,
    AsymmetricInput,
    EndpointViolation,
    NonfiniteState,
    FlowLeftChart,
    OddPanels,
    InvalidArgument,
    Parse,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind says which contract was broken.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failures carry a 1-based position.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message)
    {
    }

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

} // namespace jetvar

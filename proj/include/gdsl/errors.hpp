#pragma once

#include <stdexcept>
#include <string>

namespace gdsl {

// Base class for everything this library throws on bad input or bad state.
// I/O problems (missing files, unreadable streams) use IoError so the CLI
// can map them to a distinct exit code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define GDSL_ERROR_TYPE(Name)                                 \
    class Name : public Error {                               \
    public:                                                   \
        explicit Name(const std::string& what) : Error(what) {} \
    }

GDSL_ERROR_TYPE(CycleError);
GDSL_ERROR_TYPE(SelfLoopError);
GDSL_ERROR_TYPE(ParamError);
GDSL_ERROR_TYPE(DivergenceError);
GDSL_ERROR_TYPE(ParseError);
GDSL_ERROR_TYPE(EmptyError);
GDSL_ERROR_TYPE(DegenerateSeriesError);
GDSL_ERROR_TYPE(TooShortError);
GDSL_ERROR_TYPE(IndexError);
GDSL_ERROR_TYPE(EmptyTableError);
GDSL_ERROR_TYPE(OverflowError);
GDSL_ERROR_TYPE(TooLargeError);
GDSL_ERROR_TYPE(IoError);

#undef GDSL_ERROR_TYPE

} // namespace gdsl

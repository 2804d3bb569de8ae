#pragma once

#include <stdexcept>
#include <string>

namespace ggr
{
    /// Failure categories. The CLI maps each to a distinct exit code.
    enum class ErrorKind
    {
        invalid_argument,  ///< precondition violated by the caller
        config,            ///< malformed experiment configuration
        admissibility,     ///< (p, q, d) outside the range where the estimates hold
        non_convergence,   ///< iterative solver hit its cap
        io,                ///< file read/write failure or malformed file
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    [[noreturn]] void fail(ErrorKind kind, const std::string& what);

    inline void require(bool cond, const std::string& what)
    {
        if (!cond)
            fail(ErrorKind::invalid_argument, what);
    }

    /// Warning sink. Defaults to stderr; tests install a capturing handler.
    using WarningHandler = void (*)(const std::string&);
    WarningHandler set_warning_handler(WarningHandler handler);
    void warn(const std::string& message);
}  // namespace ggr

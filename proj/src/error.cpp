#include "ggr/error.hpp"

#include <atomic>
#include <cstdio>

namespace ggr
{
    namespace
    {
        void stderr_handler(const std::string& message) { std::fprintf(stderr, "warning: %s\n", message.c_str()); }

        std::atomic<WarningHandler> g_handler{&stderr_handler};
    }  // namespace

    void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

    WarningHandler set_warning_handler(WarningHandler handler)
    {
        return g_handler.exchange(handler ? handler : &stderr_handler);
    }

    void warn(const std::string& message) { g_handler.load()(message); }
}  // namespace ggr

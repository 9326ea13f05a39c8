#include "ctlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ctlab {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CTLAB_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
            // fall through to hardware count on junk values
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? (int)hw : 1;
}

} // namespace ctlab

#include "cgann/lattice.hpp"

#include <stdexcept>

namespace cgann {

const char* to_string(NeighborhoodKind kind) {
    switch (kind) {
        case NeighborhoodKind::News4: return "news4";
        case NeighborhoodKind::Moore8: return "moore8";
        case NeighborhoodKind::Linear5: return "linear5";
    }
    return "?";
}

NeighborhoodKind neighborhood_from_string(const std::string& name) {
    if (name == "news4") return NeighborhoodKind::News4;
    if (name == "moore8") return NeighborhoodKind::Moore8;
    if (name == "linear5") return NeighborhoodKind::Linear5;
    throw std::invalid_argument("unknown neighborhood: " + name);
}

}  // namespace cgann

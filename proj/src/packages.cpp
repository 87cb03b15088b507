#include "unexpand/dcg.hpp"
#include "unexpand/expansion.hpp"
#include "unexpand/fsyntax.hpp"

namespace unexpand {

const PackageRegistry& standard_registry(bool annotated) {
    static const PackageRegistry with_annotations = [] {
        PackageRegistry r;
        r.add(fsyntax_package(true));
        r.add(dcg_package(true));
        return r;
    }();
    static const PackageRegistry plain = [] {
        PackageRegistry r;
        r.add(fsyntax_package(false));
        r.add(dcg_package(false));
        return r;
    }();
    return annotated ? with_annotations : plain;
}

}  // namespace unexpand

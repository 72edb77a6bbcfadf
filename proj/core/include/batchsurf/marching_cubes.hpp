#pragma once

#include "batchsurf/mesh.hpp"
#include "batchsurf/segmentation.hpp"
#include "batchsurf/volume.hpp"

namespace batchsurf {

struct SurfaceParams {
    double iso_hu = 2500.0;
    /// Surround the volume with a virtual layer of -10000 HU so surfaces
    /// cut by the box close instead of leaving open rims.
    bool pad_closed = true;
    /// Defensive vertex dedup radius as a fraction of min spacing; the
    /// edge-indexed construction already shares vertices exactly.
    double weld_epsilon = 1e-6;
};

/// Copies the boxed region; origin shifts so mm coordinates match the
/// parent volume. Throws SurfaceError(BoxOutOfRange) when the box
/// exceeds the dims.
ScanVolume extract_subvolume(const ScanVolume& vol, const ChopBox& box);

/// Classic 256-case Marching Cubes at iso_hu. A corner is inside iff
/// HU >= iso; edge vertices interpolate linearly to the crossing.
/// Output vertices are in voxel-index coordinates (see scale_mesh).
/// Throws SurfaceError(EmptyMesh) when nothing reaches the iso value.
TriangleMesh marching_cubes(const ScanVolume& vol, const SurfaceParams& params);

}  // namespace batchsurf

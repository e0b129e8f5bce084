"""Synthetic RGB-D hand scene generation with full geometric annotations,
plus the matching pose/mesh evaluation metrics."""

from . import errors
from .assets import (AssetPack, Background, GraspRecord, ModelAsset,
                     load_asset_pack, make_toy_assets, write_asset_pack)
from .composite import bbox_from_mask, composite_rgb, crop_and_resize, fuse_depth
from .dataset import (SampleRecord, dump_ground_truth_predictions, load_manifest,
                      load_predictions, read_sample, verify_manifest,
                      write_manifest, write_sample)
from .hand import (HandPose, HandShape, PosedHand, attach_forearm,
                   export_keypoints, pose_from_flat, pose_mesh, shaped_template)
from .interact import assemble_interaction_scene, place_object
from .metrics import (AlignmentResult, MetricsReport, aligned_errors_mm,
                      evaluate_dataset, fscore, mpjpe, pck_auc, procrustes_align,
                      sta_align)
from .objmesh import TriMesh, load_object_mesh
from .pipeline import (GenerationConfig, build_scene, dataset_stats,
                       generate_dataset, generate_scene, load_pack, render_view)
from .render import (Material, RenderConfig, RenderOutput, SceneNode, project,
                     project_points, rasterize)
from .sampling import (CameraSpec, CropRect, LightSpec, SamplerConfig, SceneSpec,
                       interpolate_poses, look_at_camera, make_camera,
                       perturb_texture, sample_background, sample_camera,
                       sample_lights, sample_pose, sample_scene, sample_shape)

__version__ = "0.1.0"

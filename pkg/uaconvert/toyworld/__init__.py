from .gmm import (
    GmmWorld,
    JointSample,
    PosteriorGmm,
    WorldSpec,
    class_posterior_x,
    class_posterior_y,
    load_world,
    make_world,
    mmse_estimate,
    mmse_estimates,
    posterior_given_y,
    posterior_sample,
    reverse_sample,
    sample_joint,
    save_world,
)
from .sampler import ExactChannelSampler, ExactPosteriorSampler, PosteriorSampler

__all__ = [
    "ExactChannelSampler",
    "ExactPosteriorSampler",
    "GmmWorld",
    "JointSample",
    "PosteriorGmm",
    "PosteriorSampler",
    "WorldSpec",
    "class_posterior_x",
    "class_posterior_y",
    "load_world",
    "make_world",
    "mmse_estimate",
    "mmse_estimates",
    "posterior_given_y",
    "posterior_sample",
    "reverse_sample",
    "sample_joint",
    "save_world",
]

from walsh.tests.factories.pool import PoolConfigFactory, PoolSpecFactory

FACTORY_MAPPING = {
    "PoolSpec": PoolSpecFactory,
    "PoolConfig": PoolConfigFactory,
}


def get_factory(model_name):
    return FACTORY_MAPPING[model_name]

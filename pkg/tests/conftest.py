pytest_plugins = (
    'tests.fixtures.params',
    'tests.fixtures.meshes',
    'tests.fixtures.singletons',
)
